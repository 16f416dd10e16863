#pragma once

#include <cstddef>
#include <exception>

namespace gpehho {

/// Selects between the OpenMP element loop and the plain serial loop.
/// Both run the same per-element body; the serial path is the reference
/// the tests compare against bit-for-bit.
enum class Exec { serial, parallel };

/// Runs body(i) for i in [0, n). In parallel mode the first exception
/// thrown by any iteration is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t n, Exec exec, Body&& body) {
  if (exec == Exec::parallel) {
    const auto count = static_cast<std::ptrdiff_t>(n);
    std::exception_ptr error;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(gpehho_for_each_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (std::size_t i = 0; i < n; ++i) body(i);
  }
}

}  // namespace gpehho
