#pragma once

#include <stdexcept>
#include <string>

namespace gpehho {

enum class ErrorKind {
  invalid_domain,
  unsupported_degree,
  unsupported_mesh,
  invalid_parameter,
  invalid_mode,
  invalid_state,
  invalid_grid,
  assembly,
  solver,
  stagnation,
  no_admissible_sigma,
  render,
  config,
  io,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_domain: return "invalid-domain";
    case ErrorKind::unsupported_degree: return "unsupported-degree";
    case ErrorKind::unsupported_mesh: return "unsupported-mesh";
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::invalid_mode: return "invalid-mode";
    case ErrorKind::invalid_state: return "invalid-state";
    case ErrorKind::invalid_grid: return "invalid-grid";
    case ErrorKind::assembly: return "assembly";
    case ErrorKind::solver: return "solver";
    case ErrorKind::stagnation: return "stagnation";
    case ErrorKind::no_admissible_sigma: return "no-admissible-sigma";
    case ErrorKind::render: return "render";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace gpehho
