#include "ermakov/linearize.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "ermakov/errors.hpp"

namespace ermakov {

namespace {

OrbitCurve from_solution(const OdeSolution<2>& sol) {
  OrbitCurve curve;
  curve.points.reserve(sol.nodes.size());
  for (const auto& n : sol.nodes) curve.points.push_back({n.t, n.y[0], n.y[1]});
  return curve;
}

OrbitCurve solve_in_theta(const OdeRhs<2>& rhs, double rbar0, double abar0, double theta0,
                          double theta1, const IntegratorOptions& options) {
  if (!(rbar0 > 0.0)) throw PreconditionError("rbar0 must be positive");
  if (theta0 == theta1) return OrbitCurve{{{theta0, rbar0, abar0}}};
  return from_solution(solve_ode<2>(rhs, {rbar0, abar0}, theta0, theta1, options));
}

}  // namespace

double OrbitCurve::theta_min() const {
  if (points.empty()) throw PreconditionError("empty orbit curve");
  return std::min(points.front().theta, points.back().theta);
}

double OrbitCurve::theta_max() const {
  if (points.empty()) throw PreconditionError("empty orbit curve");
  return std::max(points.front().theta, points.back().theta);
}

double OrbitCurve::rbar_at(double theta) const {
  if (theta < theta_min() || theta > theta_max()) {
    throw PreconditionError("theta outside the orbit curve");
  }
  if (points.size() == 1) return points.front().rbar;
  const bool increasing = points.back().theta > points.front().theta;
  auto it = std::lower_bound(points.begin(), points.end(), theta,
                             [increasing](const OrbitPoint& p, double x) {
                               return increasing ? p.theta < x : p.theta > x;
                             });
  if (it == points.begin()) return points.front().rbar;
  if (it == points.end()) return points.back().rbar;
  const OdeNode<1> a{(it - 1)->theta, {(it - 1)->rbar}, {(it - 1)->abar}};
  const OdeNode<1> b{it->theta, {it->rbar}, {it->abar}};
  return hermite(a, b, theta)[0];
}

OrbitCurve to_orbit_curve(const Trajectory& traj) {
  if (traj.samples.empty()) throw PreconditionError("empty trajectory");
  OrbitCurve curve;
  curve.points.reserve(traj.samples.size());
  const double sign0 = traj.samples.front().state.v();
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const PhaseState& s = traj.samples[i].state;
    if (s.v() == 0.0 || (s.v() > 0.0) != (sign0 > 0.0)) {
      throw PreconditionError("v changes sign along the trajectory at t = " +
                              std::to_string(traj.samples[i].t));
    }
    curve.points.push_back({s.theta(), 1.0 / s.r(), -s.u() / s.v()});
    if (i > 0) {
      const double d = curve.points[i].theta - curve.points[i - 1].theta;
      if (d == 0.0 || (d > 0.0) != (sign0 > 0.0)) {
        throw PreconditionError("theta is not strictly monotone along the trajectory");
      }
    }
  }
  return curve;
}

double characteristic_force(const FuncHandle& phi, double rbar, double abar, double theta,
                            double t) {
  if (!(rbar > 0.0)) throw SingularStateError("r_min", "rbar must be positive");
  // abar * phi(-abar, ...) = -(alpha * phi) at alpha = -abar
  const double alpha_phi = phi.times_alpha({-abar, 1.0 / rbar, theta, t});
  return -alpha_phi / (rbar * rbar);
}

OrbitCurve integrate_characteristic(const FuncHandle& phi, double rbar0, double abar0,
                                    double theta0, double theta1, double t_param,
                                    const IntegratorOptions& options) {
  const OdeRhs<2> rhs = [&phi, t_param](double theta, const std::array<double, 2>& y) {
    return std::array<double, 2>{y[1], characteristic_force(phi, y[0], y[1], theta, t_param)};
  };
  return solve_in_theta(rhs, rbar0, abar0, theta0, theta1, options);
}

OrbitCurve integrate_affine(double A, double B, double C, double rbar0, double abar0,
                            double theta0, double theta1, const IntegratorOptions& options) {
  const OdeRhs<2> rhs = [A, B, C](double, const std::array<double, 2>& y) {
    return std::array<double, 2>{y[1], A * y[1] + B * y[0] + C};
  };
  return solve_in_theta(rhs, rbar0, abar0, theta0, theta1, options);
}

double orbit_match(const OrbitCurve& a, const OrbitCurve& b) {
  const double lo = std::max(a.theta_min(), b.theta_min());
  const double hi = std::min(a.theta_max(), b.theta_max());
  if (lo > hi) throw PreconditionError("orbit curves have disjoint theta ranges");
  double worst = 0.0;
  auto probe = [&](double theta) {
    if (theta < lo || theta > hi) return;
    worst = std::max(worst, std::fabs(a.rbar_at(theta) - b.rbar_at(theta)));
  };
  for (const auto& p : a.points) probe(p.theta);
  for (const auto& p : b.points) probe(p.theta);
  return worst;
}

double orbit_match(const Trajectory& traj, const OrbitCurve& curve) {
  return orbit_match(to_orbit_curve(traj), curve);
}

AffinityResult affinity_test(const FuncHandle& phi, double theta, double t, Range rbar_range,
                             Range abar_range, std::size_t n, double threshold,
                             Execution exec) {
  if (n < 6) throw PreconditionError("affinity_test needs at least 6 grid points per axis");
  if (!(rbar_range.lo > 0.0) || !(rbar_range.hi > rbar_range.lo) ||
      !(abar_range.hi > abar_range.lo)) {
    throw PreconditionError("affinity_test needs rbar > 0 and non-empty ranges");
  }
  const auto node = [n](const Range& range, std::size_t k) {
    return range.lo + (range.hi - range.lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  };
  const std::size_t total = n * n;
  const std::vector<double> lhs = parallel_map<double>(
      total,
      [&](std::size_t idx) {
        return characteristic_force(phi, node(rbar_range, idx / n), node(abar_range, idx % n),
                                    theta, t);
      },
      exec);

  Eigen::MatrixXd M(static_cast<Eigen::Index>(total), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(total));
  double scale = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto row = static_cast<Eigen::Index>(idx);
    M(row, 0) = node(abar_range, idx % n);
    M(row, 1) = node(rbar_range, idx / n);
    M(row, 2) = 1.0;
    y(row) = lhs[idx];
    if (!std::isfinite(lhs[idx])) throw DomainError("characteristic force is not finite on the grid");
    scale = std::max(scale, std::fabs(lhs[idx]));
  }

  AffinityResult result;
  if (scale == 0.0) {
    result.affine = true;
    return result;
  }
  const Eigen::Vector3d coef = M.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd res = M * coef - y;
  result.A = coef(0);
  result.B = coef(1);
  result.C = coef(2);
  result.residual = res.cwiseAbs().maxCoeff() / scale;
  result.affine = result.residual < threshold;
  return result;
}

}  // namespace ermakov
