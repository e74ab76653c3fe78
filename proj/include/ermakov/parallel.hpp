#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace ermakov {

enum class Execution { Serial, Parallel };

/// out[i] = f(i) for i in [0, n). The serial loop is the reference; the
/// OpenMP loop produces identical output (each index is written by exactly
/// one thread) and rethrows the lowest-index failure, as the serial loop would.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& f, Execution exec = Execution::Parallel) {
  std::vector<T> out(n);
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (long long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace ermakov
