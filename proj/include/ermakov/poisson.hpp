#pragma once

#include <array>
#include <cstddef>
#include <functional>

#include "ermakov/expr.hpp"
#include "ermakov/func_handle.hpp"
#include "ermakov/state.hpp"
#include "ermakov/systems.hpp"

namespace ermakov {

/// 4x4 skew-symmetric matrix over (r, theta, u, v). Only the strict upper
/// triangle is stored, so J(i, j) == -J(j, i) holds exactly.
class SkewMatrix4 {
 public:
  SkewMatrix4() = default;

  /// Zero-based indices.
  double operator()(std::size_t i, std::size_t j) const;
  /// Requires i < j; throws PreconditionError otherwise.
  void set(std::size_t i, std::size_t j, double value);

  double frobenius_norm() const;

 private:
  static std::size_t slot(std::size_t i, std::size_t j);
  std::array<double, 6> upper_{};
};

/// Full cofactor expansion.
double determinant(const SkewMatrix4& J);
/// Pf(J) = J01 J23 - J02 J13 + J03 J12; det(J) = Pf(J)^2.
double pfaffian(const SkewMatrix4& J);
/// det / |J|_F^4 below rel_tol.
bool is_degenerate(const SkewMatrix4& J, double rel_tol = 1e-10);

/// J * x.
Vec4 apply(const SkewMatrix4& J, const Vec4& x);
/// gradA . J . gradB
double bracket(const Vec4& gradA, const Vec4& gradB, const SkewMatrix4& J);

enum class MatrixClass { ClassI, ClassII, Canonical, Custom };

/// State-and-time dependent Poisson matrix.
struct MatrixField {
  std::function<SkewMatrix4(const Vec4&, double)> eval;
  MatrixClass tag = MatrixClass::Custom;

  SkewMatrix4 operator()(const Vec4& x, double t) const { return eval(x, t); }
};

struct Class2Options {
  double lambda0 = 0.0;
  double tol = 1e-12;
  Floors floors{};
};

/// Degenerate class: J12 = 0, J13 = (u/v)^2, J14 = u/v, J23 = u/(r^2 v),
/// J24 = 1/r^2, J34 = u phi.
SkewMatrix4 matrix_class1(const FuncHandle& phi, const PhaseState& s, double t,
                          const Floors& floors = {});

/// phi = psi(u/v) * (chi + integral from lambda0 to u/v of
///   [d_r psi + d_theta psi / (r^2 lambda) - 2 psi / r] / psi^2 dlambda).
double phi_class2(const FuncHandle& psi, const Expr& chi, const PhaseState& s, double t,
                  double tol, double lambda0 = 0.0, const Floors& floors = {});
double phi_class2_at(const FuncHandle& psi, const Expr& chi, const FuncArgs& at, double lambda0,
                     double tol);
/// The class-II phi packaged as a function handle of (alpha, r, theta, t).
FuncHandle phi_class2_handle(const FuncHandle& psi, const Expr& chi, double lambda0,
                             double tol);

/// Non-degenerate class: J13 = (u/v)^2 + u psi, J34 = u phi + 2 u v psi / r,
/// the remaining entries as class I. At u = 0 the matrix is returned (it is
/// degenerate there; see is_degenerate).
SkewMatrix4 matrix_class2(const FuncHandle& psi, const Expr& chi, const PhaseState& s, double t,
                          const Class2Options& options = {});
SkewMatrix4 matrix_class2(const FuncHandle& psi, const FuncHandle& phi, const PhaseState& s,
                          double t, const Floors& floors = {});

MatrixField class1_field(FuncHandle phi, Floors floors = {});
MatrixField class2_field(FuncHandle psi, Expr chi, Class2Options options = {});
/// The Poisson matrix field matching a system.
MatrixField field_for(const SystemSpec& spec);
/// Constant symplectic form: J13 = J24 = 1.
MatrixField canonical_field();

/// Cyclic sums J^{m a} d_m J^{b c} + J^{m b} d_m J^{c a} + J^{m c} d_m J^{a b}
/// for (a, b, c) in {(1,2,3), (1,2,4), (1,3,4), (2,3,4)}, with central
/// differences of step h. Throws PreconditionError when the stencil leaves
/// the admissible domain.
std::array<double, 4> jacobi_residuals(const MatrixField& field, const PhaseState& s, double t,
                                       double h = 1e-5);

/// J * gradH.
Flow4 hamiltonian_flow(const MatrixField& field, const Vec4& gradH, const PhaseState& s,
                       double t);

/// psi phi' - psi' phi - [d_r psi + v/(r^2 u) d_theta psi - 2 psi / r],
/// primes are d/d(u/v). Throws SingularStateError when |u| <= u_min.
double consistency_residual(const FuncHandle& psi, const FuncHandle& phi, const PhaseState& s,
                            double t, const Floors& floors = {});

/// J * gradC.
Vec4 casimir_residuals(const MatrixField& field, const Vec4& gradC, const PhaseState& s,
                       double t);

}  // namespace ermakov
