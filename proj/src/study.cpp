#include "gpehho/study.hpp"

#include "gpehho/csv.hpp"
#include "gpehho/error.hpp"
#include "gpehho/svg.hpp"
#include "gpehho/transfer.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gpehho {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

void check_keys(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorKind::config, where + " must be an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw Error(ErrorKind::config, "unknown key '" + key + "' in " + where);
}

PotentialKind parse_potential_kind(const std::string& name) {
  if (name == "zero") return PotentialKind::zero;
  if (name == "harmonic") return PotentialKind::harmonic;
  if (name == "lattice") return PotentialKind::lattice;
  if (name == "disorder") return PotentialKind::disorder;
  if (name == "table") return PotentialKind::table;
  throw Error(ErrorKind::config, "unknown potential kind '" + name + "'");
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

void prepare_output(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create output directory " + dir.string() + ": " + ec.message());
}

void dump_mesh(const fs::path& dir, const TriMesh& mesh) {
  const std::string stem = "mesh_level" + std::to_string(mesh.level);
  std::ostringstream nodes;
  std::ostringstream elements;
  write_mesh_dump(nodes, elements, mesh);
  write_file(dir / (stem + "_nodes.txt"), nodes.str());
  write_file(dir / (stem + "_elements.txt"), elements.str());
}

std::vector<TriMesh> hierarchy(const Rect& domain, int finest) {
  std::vector<TriMesh> meshes;
  meshes.reserve(static_cast<std::size_t>(finest) + 1);
  meshes.push_back(friedrichs_keller(domain));
  for (int l = 1; l <= finest; ++l) meshes.push_back(red_refine(meshes.back()));
  return meshes;
}

ojson config_json(const ExperimentConfig& c) {
  ojson j;
  j["domain"] = {c.domain.xmin, c.domain.xmax, c.domain.ymin, c.domain.ymax};
  ojson p;
  p["kind"] = to_string(c.potential.kind);
  if (c.potential.kind == PotentialKind::disorder) {
    p["cell_size"] = c.potential.cell_size;
    p["seed"] = c.potential.seed;
  }
  if (c.potential.kind == PotentialKind::table) p["file"] = c.potential.table_path.string();
  if (c.potential.projection)
    p["projection"] = {{"cell_size", c.potential.projection->cell_size},
                       {"mode", to_string(c.potential.projection->mode)}};
  j["potential"] = p;
  j["kappa"] = c.kappa;
  j["mode"] = to_string(c.mode);
  j["k"] = c.k;
  if (c.sigma)
    j["sigma"] = *c.sigma;
  else
    j["sigma"] = "auto";
  j["levels"] = {c.level_min, c.level_max};
  j["reference"] = {{"extra_levels", c.reference_extra_levels}, {"k", c.ref_k()}};
  j["solver"] = {{"tol", c.solver.tol},
                 {"max_iter", c.solver.max_iter},
                 {"tau0", c.solver.tau0},
                 {"tau_min", c.solver.tau_min},
                 {"tau_max", c.solver.tau_max},
                 {"linear_solver", to_string(c.solver.linear_solver)},
                 {"direct_limit", c.solver.direct_limit},
                 {"pcg_tol", c.solver.pcg_tol}};
  return j;
}

ojson certificate_json(const LowerBoundCertificate& c) {
  return {{"h", c.h}, {"sigma", c.sigma}, {"c_tr", c.c_tr}, {"d", c.d}, {"slack", c.slack}, {"valid", c.valid()}};
}

std::string to_string(HConvention h) { return h == HConvention::square ? "square" : "diameter"; }

const char* reference_note =
    "errors are measured against an in-family HHO reference of degree k_ref on a finer mesh; "
    "its own discretization error is included in every error column";

struct LevelSolve {
  FlowResult result;
  std::size_t dofs = 0;
  double quartic = 0.0;
  CellField bulk;
  CellField reconstruction;
};

LevelSolve solve_on(const ExperimentConfig& config, const Potential& potential, const TriMesh& mesh, Mode mode,
                    int k, double sigma, bool keep_fields) {
  const GpDiscretization disc(mesh, make_problem(config, potential, mode, k, sigma));
  FlowOptions options = config.solver;
  if (mode == Mode::modified) options.certificate_h = certificate_h(mesh, config.h_convention);
  LevelSolve out;
  out.result = gradient_flow(disc, options);
  out.dofs = disc.space().num_dofs();
  out.quartic = disc.quartic(out.result.state.u);
  if (keep_fields) {
    out.bulk = disc.space().bulk(out.result.state.u);
    out.reconstruction = disc.space().reconstruct(out.result.state.u);
  }
  return out;
}

void require_numeric_sigma(const ExperimentConfig& config) {
  if (!config.sigma) throw Error(ErrorKind::config, "sigma \"auto\" is only available for the lower-bound study");
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& what) { throw Error(ErrorKind::config, what); };
  if (!(domain.xmax > domain.xmin) || !(domain.ymax > domain.ymin)) fail("domain must have positive extent");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) fail("kappa must be finite and >= 0");
  if (k < 0 || k > 3) fail("k must lie in 0..3");
  if (mode == Mode::modified && k != 0) fail("the modified scheme requires k = 0");
  if (sigma && !(*sigma > 0.0)) fail("sigma must be > 0");
  if (!(sigma_safety > 0.0) || sigma_safety > 1.0) fail("sigma_safety must lie in (0, 1]");
  if (!(e_upper_margin >= 0.0)) fail("e_upper margin must be >= 0");
  if (e_upper_source == EUpperSource::analytic && !(e_upper_value > 0.0)) fail("analytic e_upper needs a value > 0");
  if (level_min < 0 || level_min > level_max || level_max > 12) fail("levels must satisfy 0 <= min <= max <= 12");
  if (reference_extra_levels < 0 || level_max + reference_extra_levels > 12) fail("reference level out of range");
  if (ref_k() < 0 || ref_k() > 3) fail("reference k must lie in 0..3");
  if (potential_oversampling < 0) fail("potential oversampling must be >= 0");
  if (potential.kind == PotentialKind::disorder && !(potential.cell_size > 0.0)) fail("disorder cell_size must be > 0");
  if (potential.kind == PotentialKind::table && potential.table_path.empty()) fail("table potential needs a file");
  if (potential.projection && !(potential.projection->cell_size > 0.0)) fail("projection cell_size must be > 0");
  if (potential.min_samples < 2) fail("min_samples must be >= 2");
  try {
    solver.validate();
  } catch (const Error& e) {
    fail(std::string("solver: ") + e.what());
  }
}

ExperimentConfig parse_config(const nlohmann::json& doc, const fs::path& base_dir) {
  ExperimentConfig c;
  try {
    check_keys(doc,
               {"domain", "potential", "kappa", "mode", "k", "sigma", "sigma_safety", "e_upper", "certificate_h",
                "level", "levels", "reference", "solver", "output_dir"},
               "config");
    if (doc.contains("domain")) {
      const auto d = doc.at("domain").get<std::vector<double>>();
      if (d.size() != 4) throw Error(ErrorKind::config, "domain must be [x0, x1, y0, y1]");
      c.domain = Rect{d[0], d[1], d[2], d[3]};
    }
    if (doc.contains("potential")) {
      const auto& p = doc.at("potential");
      check_keys(p, {"kind", "cell_size", "seed", "file", "projection", "min_samples", "oversampling"}, "potential");
      c.potential.kind = parse_potential_kind(p.at("kind").get<std::string>());
      c.potential.cell_size = p.value("cell_size", 1.0);
      c.potential.seed = p.value("seed", std::uint64_t{0});
      c.potential.min_samples = p.value("min_samples", 32);
      c.potential_oversampling = p.value("oversampling", 4);
      if (p.contains("file")) {
        fs::path file = p.at("file").get<std::string>();
        c.potential.table_path = file.is_relative() ? base_dir / file : file;
      }
      if (p.contains("projection")) {
        const auto& q = p.at("projection");
        check_keys(q, {"cell_size", "mode"}, "potential.projection");
        ProjectionSpec spec;
        spec.cell_size = q.value("cell_size", 0.25);
        spec.mode = parse_projection_mode(q.value("mode", std::string("min")));
        c.potential.projection = spec;
      }
    }
    c.kappa = doc.value("kappa", 0.0);
    c.mode = parse_mode(doc.value("mode", std::string("standard")));
    c.k = doc.value("k", c.mode == Mode::modified ? 0 : 1);
    if (doc.contains("sigma")) {
      const auto& s = doc.at("sigma");
      if (s.is_string()) {
        if (s.get<std::string>() != "auto") throw Error(ErrorKind::config, "sigma must be a number or \"auto\"");
        c.sigma.reset();
      } else {
        c.sigma = s.get<double>();
      }
    }
    c.sigma_safety = doc.value("sigma_safety", 1.0);
    if (doc.contains("e_upper")) {
      const auto& e = doc.at("e_upper");
      check_keys(e, {"source", "value", "margin"}, "e_upper");
      const std::string source = e.value("source", std::string("reference-run"));
      if (source == "analytic")
        c.e_upper_source = EUpperSource::analytic;
      else if (source == "reference-run")
        c.e_upper_source = EUpperSource::reference_run;
      else
        throw Error(ErrorKind::config, "unknown e_upper source '" + source + "'");
      c.e_upper_value = e.value("value", 0.0);
      c.e_upper_margin = e.value("margin", 0.01);
    }
    if (doc.contains("certificate_h")) {
      const std::string h = doc.at("certificate_h").get<std::string>();
      if (h == "square")
        c.h_convention = HConvention::square;
      else if (h == "diameter")
        c.h_convention = HConvention::diameter;
      else
        throw Error(ErrorKind::config, "certificate_h must be \"square\" or \"diameter\"");
    }
    if (doc.contains("level") && doc.contains("levels")) throw Error(ErrorKind::config, "give either level or levels");
    if (doc.contains("level")) c.level_min = c.level_max = doc.at("level").get<int>();
    if (doc.contains("levels")) {
      const auto l = doc.at("levels").get<std::vector<int>>();
      if (l.size() != 2) throw Error(ErrorKind::config, "levels must be [min, max]");
      c.level_min = l[0];
      c.level_max = l[1];
    }
    if (doc.contains("reference")) {
      const auto& r = doc.at("reference");
      check_keys(r, {"extra_levels", "k"}, "reference");
      c.reference_extra_levels = r.value("extra_levels", 2);
      if (r.contains("k")) c.reference_k = r.at("k").get<int>();
    }
    if (doc.contains("solver")) {
      const auto& s = doc.at("solver");
      check_keys(s, {"tol", "max_iter", "tau0", "tau_min", "tau_max", "linear_solver", "direct_limit", "pcg_tol"},
                 "solver");
      FlowOptions& o = c.solver;
      o.tol = s.value("tol", o.tol);
      o.max_iter = s.value("max_iter", o.max_iter);
      o.tau0 = s.value("tau0", o.tau0);
      o.tau_min = s.value("tau_min", o.tau_min);
      o.tau_max = s.value("tau_max", o.tau_max);
      o.direct_limit = s.value("direct_limit", o.direct_limit);
      o.pcg_tol = s.value("pcg_tol", o.pcg_tol);
      if (s.contains("linear_solver")) o.linear_solver = parse_linear_solver(s.at("linear_solver").get<std::string>());
    }
    if (doc.contains("output_dir")) c.output_dir = doc.at("output_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    throw Error(ErrorKind::config, e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::config, "cannot open config " + file.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, file.string() + ": " + e.what());
  }
  return parse_config(doc, file.parent_path());
}

Potential build_potential(const ExperimentConfig& config) {
  const PotentialSpec& p = config.potential;
  Potential v = Potential::zero();
  switch (p.kind) {
    case PotentialKind::zero: return v;
    case PotentialKind::harmonic: v = Potential::harmonic(); break;
    case PotentialKind::lattice: v = Potential::lattice(); break;
    case PotentialKind::disorder: v = Potential::disorder(config.domain, p.cell_size, p.seed); break;
    case PotentialKind::table: {
      std::ifstream in(p.table_path);
      if (!in) throw Error(ErrorKind::config, "cannot open potential table " + p.table_path.string());
      PotentialTable t = read_table_json(in);
      t.check_tiles(config.domain);
      v = Potential::table(std::move(t));
      break;
    }
    case PotentialKind::custom: throw Error(ErrorKind::config, "custom potentials are not configurable");
  }
  if (p.projection)
    v = Potential::table(
        project_potential_p0(v, config.domain, p.projection->cell_size, p.projection->mode, p.min_samples));
  return v;
}

GpProblem make_problem(const ExperimentConfig& config, const Potential& potential, Mode mode, int k, double sigma) {
  GpProblem p;
  p.domain = config.domain;
  p.kappa = config.kappa;
  p.potential = potential;
  p.cell_reduction = config.potential.projection ? config.potential.projection->mode : ProjectionMode::min;
  p.potential_oversampling = config.potential_oversampling;
  p.mode = mode;
  p.k = k;
  p.sigma = sigma;
  return p;
}

double certificate_h(const TriMesh& mesh, HConvention convention) {
  if (convention == HConvention::square) return square_side_h(mesh);
  return compute_geometry(mesh).max_diameter();
}

SolveReport run_solve(const ExperimentConfig& config, bool dump) {
  config.validate();
  require_numeric_sigma(config);
  if (config.level_min != config.level_max) throw Error(ErrorKind::config, "solve needs a single level");
  const Potential potential = build_potential(config);
  const TriMesh mesh = friedrichs_keller_level(config.domain, config.level_max);
  const GpDiscretization disc(mesh, make_problem(config, potential, config.mode, config.k, *config.sigma));
  FlowOptions options = config.solver;
  if (config.mode == Mode::modified) options.certificate_h = certificate_h(mesh, config.h_convention);

  prepare_output(config.output_dir);
  if (dump) dump_mesh(config.output_dir, mesh);

  SolveReport report;
  report.level = config.level_max;
  report.h = square_side_h(mesh);
  report.dofs = disc.space().num_dofs();
  ojson summary;
  summary["command"] = "solve";
  summary["config"] = config_json(config);
  summary["level"] = report.level;
  summary["h"] = report.h;
  summary["dofs"] = report.dofs;
  try {
    report.result = gradient_flow(disc, options);
  } catch (const StagnationError& e) {
    std::ostringstream trace;
    e.trace().write_csv(trace);
    write_file(config.output_dir / "trace.csv", trace.str());
    summary["status"] = "stagnation";
    summary["error"] = e.what();
    summary["timestamp"] = timestamp();
    write_file(config.output_dir / "summary.json", summary.dump(2) + "\n");
    throw;
  }
  const GroundState& gs = report.result.state;
  std::ostringstream trace;
  report.result.trace.write_csv(trace);
  write_file(config.output_dir / "trace.csv", trace.str());

  summary["status"] = "ok";
  summary["E"] = gs.energy;
  summary["lambda"] = gs.lambda;
  summary["iterations"] = gs.iterations;
  summary["residual"] = gs.residual;
  summary["energy_decrement"] = gs.energy_decrement;
  summary["residual_floor"] = report.result.residual_floor;
  summary["lambda_identity_defect"] = gs.lambda - disc.lambda_from_state(gs.u);
  summary["factorizations"] = report.result.factorizations;
  summary["linear_iterations"] = report.result.linear_iterations;
  if (gs.certificate) summary["certificate"] = certificate_json(*gs.certificate);
  summary["timestamp"] = timestamp();
  write_file(config.output_dir / "summary.json", summary.dump(2) + "\n");
  return report;
}

std::optional<double> eoc(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return std::nullopt;
  return std::log2(coarse / fine);
}

void fill_eoc(std::vector<ConvergenceRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ConvergenceRow& r = rows[i];
    if (i == 0) {
      r.eoc_l2_bulk = r.eoc_l2_rec = r.eoc_h1_rec = r.eoc_energy = r.eoc_lambda = std::nullopt;
      continue;
    }
    const ConvergenceRow& p = rows[i - 1];
    r.eoc_l2_bulk = eoc(p.err_l2_bulk, r.err_l2_bulk);
    r.eoc_l2_rec = eoc(p.err_l2_rec, r.err_l2_rec);
    r.eoc_h1_rec = eoc(p.err_h1_rec, r.err_h1_rec);
    r.eoc_energy = eoc(p.err_energy, r.err_energy);
    r.eoc_lambda = eoc(p.err_lambda, r.err_lambda);
  }
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
  const auto opt = [](const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); };
  out << "level,h,dofs,energy,lambda,quartic,iterations,residual,err_l2_bulk,err_l2_rec,err_h1_rec,err_energy,"
         "err_lambda,eoc_l2_bulk,eoc_l2_rec,eoc_h1_rec,eoc_energy,eoc_lambda\n";
  for (const ConvergenceRow& r : rows)
    out << r.level << ',' << csv_number(r.h) << ',' << r.dofs << ',' << csv_number(r.energy) << ','
        << csv_number(r.lambda) << ',' << csv_number(r.quartic) << ',' << r.iterations << ','
        << csv_number(r.residual) << ',' << csv_number(r.err_l2_bulk) << ',' << csv_number(r.err_l2_rec) << ','
        << csv_number(r.err_h1_rec) << ',' << csv_number(r.err_energy) << ',' << csv_number(r.err_lambda) << ','
        << opt(r.eoc_l2_bulk) << ',' << opt(r.eoc_l2_rec) << ',' << opt(r.eoc_h1_rec) << ',' << opt(r.eoc_energy)
        << ',' << opt(r.eoc_lambda) << '\n';
}

ConvergenceStudy run_convergence(const ExperimentConfig& config) {
  config.validate();
  require_numeric_sigma(config);
  const double sigma = *config.sigma;
  const Potential potential = build_potential(config);
  const int ref_level = config.level_max + config.reference_extra_levels;
  const std::vector<TriMesh> meshes = hierarchy(config.domain, ref_level);
  prepare_output(config.output_dir);

  ConvergenceStudy study;
  study.reference_level = ref_level;
  study.reference_k = config.ref_k();
  const TriMesh& fine = meshes[static_cast<std::size_t>(ref_level)];
  const LevelSolve ref = solve_on(config, potential, fine, Mode::standard, config.ref_k(), sigma, true);
  study.reference_energy = ref.result.state.energy;
  study.reference_lambda = ref.result.state.lambda;
  const GeometryCache fine_geo = compute_geometry(fine);

  for (int level = config.level_min; level <= config.level_max; ++level) {
    const TriMesh& mesh = meshes[static_cast<std::size_t>(level)];
    const LevelSolve s = solve_on(config, potential, mesh, config.mode, config.k, sigma, true);
    std::vector<const TriMesh*> chain;
    for (int l = level; l <= ref_level; ++l) chain.push_back(&meshes[static_cast<std::size_t>(l)]);
    CellField rec = transfer_to_fine(chain, s.reconstruction, s.reconstruction.degree);
    CellField bulk = transfer_to_fine(chain, s.bulk, s.bulk.degree);
    const int n = std::min(bulk.block(), ref.reconstruction.block());
    double pairing = 0.0;
    for (std::size_t c = 0; c < fine.num_cells(); ++c)
      pairing += bulk.cell(c).head(n).dot(ref.reconstruction.cell(c).head(n));
    if (pairing < 0.0) {
      rec.coeffs = -rec.coeffs;
      bulk.coeffs = -bulk.coeffs;
    }
    const FieldDistance drec = field_distance(fine, fine_geo, rec, ref.reconstruction);
    const FieldDistance dbulk = field_distance(fine, fine_geo, bulk, ref.reconstruction);

    ConvergenceRow row;
    row.level = level;
    row.h = square_side_h(mesh);
    row.dofs = s.dofs;
    row.energy = s.result.state.energy;
    row.lambda = s.result.state.lambda;
    row.quartic = s.quartic;
    row.iterations = s.result.state.iterations;
    row.residual = s.result.state.residual;
    row.err_l2_bulk = dbulk.l2;
    row.err_l2_rec = drec.l2;
    row.err_h1_rec = drec.h1;
    row.err_energy = std::abs(row.energy - study.reference_energy);
    row.err_lambda = std::abs(row.lambda - study.reference_lambda);
    study.rows.push_back(row);
  }
  fill_eoc(study.rows);

  std::ostringstream csv;
  write_convergence_csv(csv, study.rows);
  write_file(config.output_dir / "convergence.csv", csv.str());

  std::vector<SvgSeries> series(5);
  series[0].name = "L2 bulk";
  series[1].name = "L2 rec";
  series[2].name = "H1 rec";
  series[3].name = "|E - E_ref|";
  series[4].name = "|lambda - lambda_ref|";
  for (const ConvergenceRow& r : study.rows) {
    const double values[5] = {r.err_l2_bulk, r.err_l2_rec, r.err_h1_rec, r.err_energy, r.err_lambda};
    // Exact zeros have no place on a log axis.
    for (int i = 0; i < 5; ++i)
      if (values[i] > 0.0) series[static_cast<std::size_t>(i)].points.emplace_back(r.h, values[i]);
  }
  const double k = config.k;
  write_file(config.output_dir / "convergence.svg",
             emit_svg_loglog(series, "h", "error", {k + 1.0, k + 2.0, 2.0 * k + 2.0},
                             "convergence, k = " + std::to_string(config.k) + ", mode " + to_string(config.mode)));

  ojson summary;
  summary["command"] = "convergence";
  summary["config"] = config_json(config);
  summary["reference"] = {{"level", ref_level},
                          {"k", config.ref_k()},
                          {"dofs", ref.dofs},
                          {"E", study.reference_energy},
                          {"lambda", study.reference_lambda},
                          {"iterations", ref.result.state.iterations},
                          {"residual", ref.result.state.residual},
                          {"note", reference_note}};
  summary["timestamp"] = timestamp();
  write_file(config.output_dir / "summary.json", summary.dump(2) + "\n");
  return study;
}

void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows) {
  out << "level,h,dofs,feasible,sigma,c_tr,energy,lambda,quartic,slack,certified,e_ref,gap,iterations,residual\n";
  for (const BoundRow& r : rows) {
    out << r.level << ',' << csv_number(r.h) << ',' << r.dofs << ',' << (r.feasible ? 1 : 0) << ',';
    if (r.feasible)
      out << csv_number(r.sigma) << ',' << csv_number(r.c_tr) << ',' << csv_number(r.energy) << ','
          << csv_number(r.lambda) << ',' << csv_number(r.quartic) << ',' << csv_number(r.slack) << ','
          << (r.slack >= 0.0 ? 1 : 0) << ',' << csv_number(r.e_ref) << ',' << csv_number(r.gap) << ',' << r.iterations << ',' << csv_number(r.residual);
    else
      out << ",,,,,,0," << csv_number(r.e_ref) << ",,,";
    out << '\n';
  }
}

BoundStudy run_lowerbound(const ExperimentConfig& config) {
  config.validate();
  if (config.mode != Mode::modified) throw Error(ErrorKind::config, "the lower-bound study needs mode \"modified\"");
  const Potential potential = build_potential(config);
  if (!potential.piecewise_constant())
    throw Error(ErrorKind::config, "the lower-bound study needs a piecewise-constant potential (add a projection)");
  const double ref_sigma = config.sigma.value_or(1.0);
  const int finest = config.level_max + config.reference_extra_levels;
  const std::vector<TriMesh> meshes = hierarchy(config.domain, finest);
  prepare_output(config.output_dir);

  std::map<int, double> reference;
  const auto reference_energy = [&](int level) {
    auto it = reference.find(level);
    if (it != reference.end()) return it->second;
    const LevelSolve s = solve_on(config, potential, meshes[static_cast<std::size_t>(level)], Mode::standard,
                                  config.ref_k(), ref_sigma, false);
    reference.emplace(level, s.result.state.energy);
    return s.result.state.energy;
  };

  BoundStudy study;
  study.e_upper = config.e_upper_source == EUpperSource::analytic
                      ? config.e_upper_value
                      : reference_energy(config.level_max) * (1.0 + config.e_upper_margin);

  bool any_feasible = false;
  for (int level = config.level_min; level <= config.level_max; ++level) {
    const TriMesh& mesh = meshes[static_cast<std::size_t>(level)];
    BoundRow row;
    row.level = level;
    row.h = certificate_h(mesh, config.h_convention);
    row.e_ref = reference_energy(level + config.reference_extra_levels);
    double sigma = 0.0;
    try {
      sigma = config.sigma ? *config.sigma : auto_sigma(row.h, study.e_upper, 2, config.sigma_safety);
      row.feasible = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::no_admissible_sigma) throw;
    }
    if (row.feasible) {
      any_feasible = true;
      const LevelSolve s = solve_on(config, potential, mesh, Mode::modified, 0, sigma, false);
      const GroundState& gs = s.result.state;
      row.dofs = s.dofs;
      row.sigma = sigma;
      row.c_tr = gs.certificate->c_tr;
      row.energy = gs.energy;
      row.lambda = gs.lambda;
      row.quartic = s.quartic;
      row.slack = gs.certificate->slack;
      row.gap = row.e_ref - gs.energy;
      row.iterations = gs.iterations;
      row.residual = gs.residual;
    }
    study.rows.push_back(row);
  }

  std::ostringstream csv;
  write_bounds_csv(csv, study.rows);
  write_file(config.output_dir / "bounds.csv", csv.str());

  std::vector<SvgSeries> series(2);
  series[0].name = "E_h^0 (modified)";
  series[1].name = "E_ref";
  for (const BoundRow& r : study.rows) {
    if (r.feasible && r.energy > 0.0) series[0].points.emplace_back(r.h, r.energy);
    if (r.e_ref > 0.0) series[1].points.emplace_back(r.h, r.e_ref);
  }
  write_file(config.output_dir / "bounds.svg", emit_svg_loglog(series, "h", "energy", {}, "lower energy bounds"));

  ojson summary;
  summary["command"] = "lower-bound";
  summary["config"] = config_json(config);
  summary["e_upper"] = study.e_upper;
  summary["e_upper_source"] = config.e_upper_source == EUpperSource::analytic ? "analytic" : "reference-run";
  summary["certificate_h"] = to_string(config.h_convention);
  summary["reference_note"] = reference_note;
  bool all_certified = true;
  for (const BoundRow& r : study.rows)
    if (r.feasible && r.slack < 0.0) all_certified = false;
  summary["all_certified"] = all_certified;
  summary["timestamp"] = timestamp();
  write_file(config.output_dir / "summary.json", summary.dump(2) + "\n");

  if (!any_feasible) throw Error(ErrorKind::no_admissible_sigma, "no level admits a positive sigma");
  return study;
}

std::vector<MeshInfoRow> run_mesh_info(const ExperimentConfig& config, bool dump) {
  config.validate();
  const std::vector<TriMesh> meshes = hierarchy(config.domain, config.level_max);
  prepare_output(config.output_dir);
  std::vector<MeshInfoRow> rows;
  ojson levels = ojson::array();
  for (int level = config.level_min; level <= config.level_max; ++level) {
    const TriMesh& m = meshes[static_cast<std::size_t>(level)];
    const GeometryCache geo = compute_geometry(m);
    MeshInfoRow r;
    r.level = level;
    r.vertices = m.num_vertices();
    r.cells = m.num_cells();
    r.faces = m.num_faces();
    r.interior_faces = m.num_faces() - m.num_boundary_faces();
    r.h = square_side_h(m);
    r.max_diameter = geo.max_diameter();
    r.dofs = r.cells * static_cast<std::size_t>(cell_dim(config.k + 1)) +
             r.interior_faces * static_cast<std::size_t>(face_dim(config.k));
    rows.push_back(r);
    levels.push_back({{"level", r.level},
                      {"vertices", r.vertices},
                      {"cells", r.cells},
                      {"faces", r.faces},
                      {"interior_faces", r.interior_faces},
                      {"h", r.h},
                      {"max_diameter", r.max_diameter},
                      {"dofs", r.dofs}});
    if (dump) dump_mesh(config.output_dir, m);
  }
  ojson summary;
  summary["command"] = "mesh-info";
  summary["domain"] = {config.domain.xmin, config.domain.xmax, config.domain.ymin, config.domain.ymax};
  summary["k"] = config.k;
  summary["levels"] = levels;
  summary["timestamp"] = timestamp();
  write_file(config.output_dir / "summary.json", summary.dump(2) + "\n");
  return rows;
}

}  // namespace gpehho
