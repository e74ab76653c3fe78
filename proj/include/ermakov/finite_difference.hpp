#pragma once

namespace ermakov {

/// (f(x + h) - f(x - h)) / 2h.
template <class F>
double central_difference(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Five-point stencil, O(h^4).
template <class F>
double central_difference4(F&& f, double x, double h) {
  const double d1 = f(x + h) - f(x - h);
  const double d2 = f(x + 2.0 * h) - f(x - 2.0 * h);
  return (8.0 * d1 - d2) / (12.0 * h);
}

}  // namespace ermakov
