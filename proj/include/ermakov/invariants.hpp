#pragma once

#include <functional>
#include <optional>
#include <string>

#include "ermakov/expr.hpp"
#include "ermakov/state.hpp"
#include "ermakov/systems.hpp"

namespace ermakov {

/// Integration-constant choices behind an invariant value. Two values are
/// comparable only when their conventions are equal.
struct Conventions {
  double lambda_lower = 0.0;                 // lower limit of the G integral
  std::string c2_lower = "turning_point";    // or a numeric lower limit
  std::string c2_branch = "sigma=sign(-u/v)";

  bool operator==(const Conventions&) const = default;
};

struct InvariantValue {
  std::string name;  // "I", "C1", "C2"
  double value = 0.0;
  Conventions conventions;
};

/// Lambda(theta): integral of G from 0 to theta.
double angular_potential(const Expr& G, double theta, double tol = 1e-12);

/// I = v^2 / 2 + Lambda(theta).
double ermakov_invariant(const Expr& G, const PhaseState& s);
/// (0, G(theta), 0, v)
Vec4 grad_ermakov(const Expr& G, const PhaseState& s);

/// C1 = (u/v)^2 / 2 + V(1/r, t).
double casimir_C1(const Potential& V, const PhaseState& s, double t, const Floors& floors = {});
Vec4 grad_casimir_C1(const Potential& V, const PhaseState& s, double t,
                     const Floors& floors = {});

enum class C2Method { Auto, ClosedForm, Quadrature };

struct C2Options {
  C2Method method = C2Method::Auto;
  /// Constant lower limit for the rbar integral. Unset: the turning point
  /// C1 = V(lambda) nearest to 1/r.
  std::optional<double> lower_limit;
  double tol = 1e-12;
  Floors floors{};
};

/// C2 = theta - sigma / sqrt(2) * integral of (c1 - V(lambda, t))^(-1/2) up to 1/r,
/// sigma = sign(-u/v). Auto uses the closed form for the singular
/// oscillator V = 1/(2 rbar^2) and quadrature otherwise.
double casimir_C2(const Potential& V, const PhaseState& s, double t, double c1,
                  const C2Options& options = {});
/// C2 with c1 = casimir_C1(V, s, t), i.e. as a phase-space function.
double casimir_C2(const Potential& V, const PhaseState& s, double t,
                  const C2Options& options = {});
/// Five-point finite-difference gradient of the phase-space function C2.
Vec4 grad_casimir_C2(const Potential& V, const PhaseState& s, double t,
                     const C2Options& options = {}, double h = 1e-4);

/// Root of c1 = V(lambda, t) nearest to rbar, on the side where V rises.
double turning_point(const Potential& V, double c1, double rbar, double t);

/// sqrt(2 (I - Lambda(theta))) >= 0.
double h_of_theta(const Expr& G, double theta, double I, double tol = 1e-12);

/// Integral of r(lambda)^2 / h(lambda, I) from theta0 to theta1.
double elapsed_time(const std::function<double(double)>& orbit, const Expr& G, double I,
                    double theta0, double theta1, double tol = 1e-10);

/// r^2 = 2 c1 / (1 + 4 c1^2 (theta - c2)^2); requires c1 > 0.
double spiral_radius(double c1, double c2, double theta);

Conventions conventions_for(const C2Options& options);

}  // namespace ermakov
