#include "ermakov/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ermakov/errors.hpp"
#include "ermakov/finite_difference.hpp"
#include "ermakov/func_handle.hpp"
#include "ermakov/quadrature.hpp"

namespace ermakov {

double angular_potential(const Expr& G, double theta, double tol) {
  if (!G.depends_on(var::theta)) return eval_theta_function(G, 0.0) * theta;
  return quad_adaptive([&](double lambda) { return eval_theta_function(G, lambda); }, 0.0, theta,
                       tol);
}

double ermakov_invariant(const Expr& G, const PhaseState& s) {
  return 0.5 * s.v() * s.v() + angular_potential(G, s.theta());
}

Vec4 grad_ermakov(const Expr& G, const PhaseState& s) {
  return {0.0, eval_theta_function(G, s.theta()), 0.0, s.v()};
}

double casimir_C1(const Potential& V, const PhaseState& s, double t, const Floors& floors) {
  const double alpha = s.alpha(floors.v_min);
  return 0.5 * alpha * alpha + V.value(1.0 / s.r(), t);
}

Vec4 grad_casimir_C1(const Potential& V, const PhaseState& s, double t, const Floors& floors) {
  const double alpha = s.alpha(floors.v_min);
  const double r = s.r();
  const double v = s.v();
  return {-V.derivative(1.0 / r, t) / (r * r), 0.0, alpha / v, -alpha * alpha / v};
}

double turning_point(const Potential& V, double c1, double rbar, double t) {
  auto gap = [&](double lambda) { return c1 - V.value(lambda, t); };
  const double slope = V.derivative(rbar, t);
  if (slope == 0.0 || !std::isfinite(slope)) {
    throw PreconditionError("no turning point direction: dV/drbar vanishes at 1/r");
  }
  if (gap(rbar) < 0.0) throw PreconditionError("c1 < V(1/r): state outside the allowed region");
  const double ratio = slope < 0.0 ? 0.9 : 1.0 / 0.9;
  double inside = rbar;
  double outside = rbar;
  bool bracketed = false;
  for (int k = 0; k < 400; ++k) {
    outside = inside * ratio;
    if (gap(outside) <= 0.0) {
      bracketed = true;
      break;
    }
    inside = outside;
  }
  if (!bracketed) throw PreconditionError("no turning point found for the pseudo potential");
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (inside + outside);
    if (mid == inside || mid == outside) break;
    (gap(mid) > 0.0 ? inside : outside) = mid;
  }
  return inside;
}

namespace {

double branch_sign(const PhaseState& s) { return s.u() / s.v() > 0.0 ? -1.0 : 1.0; }

double c2_closed_form(const PhaseState& s, double c1) {
  if (!(c1 > 0.0)) throw PreconditionError("singular-oscillator C2 requires c1 > 0");
  const double rbar = 1.0 / s.r();
  double radicand = 2.0 * c1 * rbar * rbar - 1.0;
  if (radicand < 0.0) {
    if (radicand < -1e-12) throw PreconditionError("c1 < V(1/r): C2 radicand negative");
    radicand = 0.0;
  }
  const double root = std::sqrt(radicand);
  if (s.u() == 0.0) {
    if (root > 1e-7) throw PreconditionError("C2 branch undefined at u/v = 0 off the turning point");
    return s.theta();
  }
  return s.theta() - branch_sign(s) * root / (2.0 * c1);
}

// Integral of (c1 - V)^(-1/2) from the turning point to rbar, with
// lambda = lambda* + e s^2 removing the inverse-square-root endpoint.
double integral_from_turning_point(const Potential& V, double c1, double rbar, double t,
                                   double tol) {
  const double gap0 = c1 - V.value(rbar, t);
  if (gap0 < 0.0) throw PreconditionError("c1 < V(1/r): C2 integrand complex");
  if (gap0 == 0.0) return 0.0;
  const double lambda_star = turning_point(V, c1, rbar, t);
  const double e = rbar > lambda_star ? 1.0 : -1.0;
  const double S = std::sqrt(std::fabs(rbar - lambda_star));
  // Near lambda* the difference c1 - V is rounding noise; there
  // (c1 - V) / s^2 is the mean of -e V' over [lambda*, lambda], by Simpson.
  const double near = 1e-3 * std::max(1.0, std::fabs(lambda_star));
  const double d0 = V.derivative(lambda_star, t);
  return quad_adaptive(
      [&](double s) {
        const double lambda = lambda_star + e * s * s;
        double q = 0.0;
        if (s * s < near) {
          const double mid = V.derivative(lambda_star + 0.5 * e * s * s, t);
          q = -e * (d0 + 4.0 * mid + V.derivative(lambda, t)) / 6.0;
        } else {
          q = (c1 - V.value(lambda, t)) / (s * s);
        }
        if (!(q > 0.0)) throw QuadratureError("C2 integrand singular on path");
        return 2.0 * e / std::sqrt(q);
      },
      0.0, S, tol);
}

}  // namespace

double casimir_C2(const Potential& V, const PhaseState& s, double t, double c1,
                  const C2Options& options) {
  (void)s.alpha(options.floors.v_min);
  const bool closed = options.method == C2Method::ClosedForm ||
                      (options.method == C2Method::Auto && V.singular_oscillator &&
                       !options.lower_limit);
  if (closed) {
    if (!V.singular_oscillator) {
      throw PreconditionError("closed-form C2 exists only for V = 1/(2 rbar^2)");
    }
    return c2_closed_form(s, c1);
  }
  const double rbar = 1.0 / s.r();
  double integral = 0.0;
  if (options.lower_limit) {
    integral = quad_adaptive(
        [&](double lambda) { return 1.0 / std::sqrt(c1 - V.value(lambda, t)); },
        *options.lower_limit, rbar, options.tol);
  } else {
    integral = integral_from_turning_point(V, c1, rbar, t, options.tol);
  }
  if (s.u() == 0.0) {
    if (integral != 0.0) {
      throw PreconditionError("C2 branch undefined at u/v = 0; use the closed-form limit");
    }
    return s.theta();
  }
  return s.theta() - branch_sign(s) * integral / std::sqrt(2.0);
}

double casimir_C2(const Potential& V, const PhaseState& s, double t, const C2Options& options) {
  return casimir_C2(V, s, t, casimir_C1(V, s, t, options.floors), options);
}

Vec4 grad_casimir_C2(const Potential& V, const PhaseState& s, double t, const C2Options& options,
                     double h) {
  Vec4 grad{};
  const Vec4 x = s.coords();
  for (std::size_t m = 0; m < 4; ++m) {
    const double step = h * std::max(1.0, std::fabs(x[m]));
    grad[m] = central_difference4(
        [&](double xm) {
          Vec4 y = x;
          y[m] = xm;
          return casimir_C2(V, PhaseState(y), t, options);
        },
        x[m], step);
  }
  return grad;
}

double h_of_theta(const Expr& G, double theta, double I, double tol) {
  double radicand = I - angular_potential(G, theta, tol);
  if (radicand < 0.0) {
    if (radicand < -100.0 * tol * std::max(1.0, std::fabs(I))) {
      throw PreconditionError("h(theta, I): negative radicand, theta beyond the turning angle");
    }
    radicand = 0.0;
  }
  return std::sqrt(2.0 * radicand);
}

double elapsed_time(const std::function<double(double)>& orbit, const Expr& G, double I,
                    double theta0, double theta1, double tol) {
  if (theta0 == theta1) return 0.0;
  try {
    return quad_adaptive(
        [&](double lambda) {
          const double r = orbit(lambda);
          return r * r / h_of_theta(G, lambda, I);
        },
        theta0, theta1, tol);
  } catch (const QuadratureError& e) {
    throw PreconditionError(std::string("turning point inside the angle interval: ") + e.what());
  } catch (const PreconditionError& e) {
    throw PreconditionError(std::string("turning point inside the angle interval: ") + e.what());
  }
}

double spiral_radius(double c1, double c2, double theta) {
  if (!(c1 > 0.0)) throw PreconditionError("spiral_radius requires c1 > 0");
  const double d = theta - c2;
  return std::sqrt(2.0 * c1 / (1.0 + 4.0 * c1 * c1 * d * d));
}

Conventions conventions_for(const C2Options& options) {
  Conventions c;
  if (options.lower_limit) c.c2_lower = std::to_string(*options.lower_limit);
  return c;
}

}  // namespace ermakov
