#pragma once

#include <cstddef>
#include <functional>

namespace ermakov {

struct QuadratureOptions {
  std::size_t max_subdivisions = 2000;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature with interval halving.
/// Returns the integral of f over [a, b] with estimated absolute error <= tol;
/// integration limits may be given in either order.
/// Throws QuadratureError on a non-finite integrand sample or when the
/// subdivision limit is exhausted before the tolerance is met.
double quad_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                     const QuadratureOptions& options = {});

}  // namespace ermakov
