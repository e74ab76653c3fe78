#pragma once

#include <cstddef>
#include <vector>

#include "ermakov/func_handle.hpp"
#include "ermakov/integrate.hpp"
#include "ermakov/ode.hpp"
#include "ermakov/parallel.hpp"

namespace ermakov {

struct OrbitPoint {
  double theta;
  double rbar;  // 1 / r
  double abar;  // d rbar / d theta = -u / v
};

/// Orbit with theta as the independent variable; theta is strictly monotone.
struct OrbitCurve {
  std::vector<OrbitPoint> points;

  double theta_min() const;
  double theta_max() const;
  /// Cubic Hermite in theta, using abar as the slope.
  double rbar_at(double theta) const;
};

/// (r, theta, u, v) -> (theta, 1/r, -u/v). Throws PreconditionError if v
/// vanishes or changes sign, or theta fails to be strictly monotone.
OrbitCurve to_orbit_curve(const Trajectory& traj);

/// Right-hand side d abar / d theta = (abar / rbar^2) phi(-abar, 1/rbar, theta, t).
double characteristic_force(const FuncHandle& phi, double rbar, double abar, double theta,
                            double t);

/// Integrates rbar' = abar, abar' = characteristic_force in theta, with the
/// time frozen at t_param. theta1 may precede theta0.
OrbitCurve integrate_characteristic(const FuncHandle& phi, double rbar0, double abar0,
                                    double theta0, double theta1, double t_param,
                                    const IntegratorOptions& options = {});

/// rbar'' = A rbar' + B rbar + C with constant coefficients.
OrbitCurve integrate_affine(double A, double B, double C, double rbar0, double abar0,
                            double theta0, double theta1, const IntegratorOptions& options = {});

/// max |rbar_a - rbar_b| over the nodes of both curves inside the common
/// theta range. Throws PreconditionError if the ranges do not overlap.
double orbit_match(const OrbitCurve& a, const OrbitCurve& b);
double orbit_match(const Trajectory& traj, const OrbitCurve& curve);

struct Range {
  double lo;
  double hi;
};

struct AffinityResult {
  bool affine = false;
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  /// Max fit residual divided by the largest sampled magnitude.
  double residual = 0.0;
};

/// Least-squares fit of characteristic_force to A abar + B rbar + C on an
/// n x n grid; affine when the normalized residual is below `threshold`.
AffinityResult affinity_test(const FuncHandle& phi, double theta, double t, Range rbar_range,
                             Range abar_range, std::size_t n, double threshold = 1e-8,
                             Execution exec = Execution::Parallel);

}  // namespace ermakov
