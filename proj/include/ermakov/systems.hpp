#pragma once

#include <variant>

#include "ermakov/expr.hpp"
#include "ermakov/func_handle.hpp"
#include "ermakov/state.hpp"

namespace ermakov {

/// Pseudo potential V(rbar, t) together with its rbar-derivative.
struct Potential {
  Expr V;
  Expr dV;
  /// V(rbar) = 1 / (2 rbar^2), recognized numerically at construction.
  bool singular_oscillator = false;

  /// Throws ConfigError if V uses variables other than rbar, t.
  static Potential from_expr(Expr V);

  double value(double rbar, double t) const;
  double derivative(double rbar, double t) const;
};

struct ClassI {
  Expr G;
  Expr F;
  FuncHandle phi;
};

struct ClassII {
  Expr G;
  Expr F;
  FuncHandle psi;
  Expr chi;
  double lambda0 = 0.0;
  double quad_tol = 1e-12;
  FuncHandle phi;  // built from psi, chi, lambda0 by phi_class2_handle
};

struct PseudoPotential {
  Expr G;
  Potential V;
};

enum class SystemClass { ClassI, ClassII, PseudoPotential };

/// A complete Ermakov system of one of the Poisson-admitting classes.
struct SystemSpec {
  std::variant<ClassI, ClassII, PseudoPotential> kind;
  Floors floors;

  static SystemSpec class1(Expr G, FuncHandle phi, Expr F = {}, Floors floors = {});
  static SystemSpec class2(Expr G, FuncHandle psi, Expr chi, Expr F = {}, double lambda0 = 0.0,
                           double quad_tol = 1e-12, Floors floors = {});
  static SystemSpec pseudo_potential(Expr G, Expr V, Floors floors = {});

  SystemClass system_class() const;
  const Expr& G() const;
  /// Zero for PseudoPotential.
  Expr F() const;
  /// The class-I phi for ClassI and PseudoPotential (built from V); the
  /// integral-formula phi for ClassII.
  FuncHandle phi() const;
};

/// (dr/dt, dtheta/dt, du/dt, dv/dt) = (u, v/r^2, rddot, -G(theta)/r^2).
Flow4 vector_field(const SystemSpec& spec, const PhaseState& s, double t);

/// omega^2 including the F(theta)/r^4 contribution.
double frequency_squared(const SystemSpec& spec, const PhaseState& s, double t);

/// phi(alpha, r, theta, t) = (dV/drbar)(1/r, t) / (r^2 alpha).
FuncHandle build_phi_from_potential(const Potential& V, double alpha_floor = 1e-12);

/// PseudoPotential -> ClassI with the built phi. With `expression_phi`
/// the phi is the equivalent parsed expression instead of the builtin.
SystemSpec lower_to_class1(const SystemSpec& pseudo, bool expression_phi = false);

/// Evaluates G(theta) (or F) at theta.
double eval_theta_function(const Expr& e, double theta);

}  // namespace ermakov
