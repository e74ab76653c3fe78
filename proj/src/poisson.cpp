#include "ermakov/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "ermakov/errors.hpp"
#include "ermakov/quadrature.hpp"

namespace ermakov {

// ---------------------------------------------------------------- SkewMatrix4

std::size_t SkewMatrix4::slot(std::size_t i, std::size_t j) {
  // (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
  static constexpr std::size_t table[4][4] = {
      {6, 0, 1, 2}, {0, 6, 3, 4}, {1, 3, 6, 5}, {2, 4, 5, 6}};
  return table[i][j];
}

double SkewMatrix4::operator()(std::size_t i, std::size_t j) const {
  if (i > 3 || j > 3) throw PreconditionError("SkewMatrix4 index out of range");
  if (i == j) return 0.0;
  return i < j ? upper_[slot(i, j)] : -upper_[slot(i, j)];
}

void SkewMatrix4::set(std::size_t i, std::size_t j, double value) {
  if (!(i < j && j < 4)) {
    throw PreconditionError("SkewMatrix4::set requires i < j < 4");
  }
  upper_[slot(i, j)] = value;
}

double SkewMatrix4::frobenius_norm() const {
  double sum = 0.0;
  for (double x : upper_) sum += 2.0 * x * x;
  return std::sqrt(sum);
}

double determinant(const SkewMatrix4& J) {
  auto minor3 = [&](std::size_t skip_col) {
    std::size_t cols[3];
    std::size_t k = 0;
    for (std::size_t c = 0; c < 4; ++c) {
      if (c != skip_col) cols[k++] = c;
    }
    auto m = [&](std::size_t row, std::size_t col) { return J(row + 1, cols[col]); };
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  };
  double det = 0.0;
  double sign = 1.0;
  for (std::size_t c = 0; c < 4; ++c) {
    det += sign * J(0, c) * minor3(c);
    sign = -sign;
  }
  return det;
}

double pfaffian(const SkewMatrix4& J) {
  return J(0, 1) * J(2, 3) - J(0, 2) * J(1, 3) + J(0, 3) * J(1, 2);
}

bool is_degenerate(const SkewMatrix4& J, double rel_tol) {
  const double n = J.frobenius_norm();
  if (n == 0.0) return true;
  return std::fabs(determinant(J)) / (n * n * n * n) < rel_tol;
}

Vec4 apply(const SkewMatrix4& J, const Vec4& x) {
  Vec4 out{};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) out[i] += J(i, j) * x[j];
  }
  return out;
}

double bracket(const Vec4& gradA, const Vec4& gradB, const SkewMatrix4& J) {
  // Pairwise over the upper triangle, so {A, A} is exactly 0.
  double sum = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      sum += J(i, j) * (gradA[i] * gradB[j] - gradA[j] * gradB[i]);
    }
  }
  return sum;
}

// ---------------------------------------------------------------- matrices

namespace {

void check_floors(const PhaseState& s, const Floors& floors) {
  if (!(s.r() > floors.r_min)) {
    throw SingularStateError("r_min", "r = " + std::to_string(s.r()) + " <= r_min");
  }
  (void)s.alpha(floors.v_min);
}

}  // namespace

SkewMatrix4 matrix_class1(const FuncHandle& phi, const PhaseState& s, double t,
                          const Floors& floors) {
  check_floors(s, floors);
  const double r = s.r();
  const double u = s.u();
  const double v = s.v();
  const double alpha = u / v;
  SkewMatrix4 J;
  J.set(kR, kU, alpha * alpha);
  J.set(kR, kV, alpha);
  J.set(kTheta, kU, u / (r * r * v));
  J.set(kTheta, kV, 1.0 / (r * r));
  // u phi, written as v (alpha phi) so removable poles of phi at alpha = 0
  // (pseudo-potential phi) do not produce 0/0.
  J.set(kU, kV, v * phi.times_alpha({alpha, r, s.theta(), t}));
  return J;
}

double phi_class2_at(const FuncHandle& psi, const Expr& chi, const FuncArgs& at, double lambda0,
                     double tol) {
  const double r = at.r;
  const bool theta_term = psi.depends_on(FuncArg::Theta);
  const double lo = std::min(lambda0, at.alpha);
  const double hi = std::max(lambda0, at.alpha);
  if (theta_term && lo <= 0.0 && hi >= 0.0 && lo != hi) {
    throw PreconditionError(
        "class-II phi integral path crosses lambda = 0 while psi depends on theta; choose "
        "lambda0 with the sign of u/v");
  }
  auto integrand = [&](double lambda) {
    const FuncArgs a{lambda, r, at.theta, at.t};
    const double p = psi(a);
    if (p == 0.0) {
      throw SingularStateError("psi", "psi vanishes on the class-II integration path");
    }
    double numer = psi.partial(FuncArg::R, a) - 2.0 / r * p;
    if (theta_term) numer += psi.partial(FuncArg::Theta, a) / (r * r * lambda);
    return numer / (p * p);
  };
  const double integral = quad_adaptive(integrand, lambda0, at.alpha, tol);
  Bindings b;
  b.set(var::r, r).set(var::theta, at.theta).set(var::t, at.t);
  const double psi_here = psi(at);
  if (psi_here == 0.0) throw SingularStateError("psi", "psi vanishes at the state");
  return (integral + chi.eval(b)) * psi_here;
}

double phi_class2(const FuncHandle& psi, const Expr& chi, const PhaseState& s, double t,
                  double tol, double lambda0, const Floors& floors) {
  check_floors(s, floors);
  return phi_class2_at(psi, chi, {s.u() / s.v(), s.r(), s.theta(), t}, lambda0, tol);
}

namespace {

class Class2Phi final : public FuncHandle::Impl {
 public:
  Class2Phi(FuncHandle psi, Expr chi, double lambda0, double tol)
      : psi_(std::move(psi)), chi_(std::move(chi)), lambda0_(lambda0), tol_(tol) {}

  double value(const FuncArgs& a) const override {
    return phi_class2_at(psi_, chi_, a, lambda0_, tol_);
  }

  std::string describe() const override {
    return "class2_phi(psi = " + psi_.describe() + ", chi = " + print(chi_) +
           ", lambda0 = " + std::to_string(lambda0_) + ")";
  }

 private:
  FuncHandle psi_;
  Expr chi_;
  double lambda0_;
  double tol_;
};

}  // namespace

FuncHandle phi_class2_handle(const FuncHandle& psi, const Expr& chi, double lambda0,
                             double tol) {
  return FuncHandle::from_impl(std::make_shared<Class2Phi>(psi, chi, lambda0, tol));
}

SkewMatrix4 matrix_class2(const FuncHandle& psi, const FuncHandle& phi, const PhaseState& s,
                          double t, const Floors& floors) {
  check_floors(s, floors);
  const double r = s.r();
  const double u = s.u();
  const double v = s.v();
  const double alpha = u / v;
  const FuncArgs args{alpha, r, s.theta(), t};
  const double p = psi(args);
  SkewMatrix4 J;
  J.set(kR, kU, alpha * alpha + u * p);
  J.set(kR, kV, alpha);
  J.set(kTheta, kU, u / (r * r * v));
  J.set(kTheta, kV, 1.0 / (r * r));
  J.set(kU, kV, u * phi(args) + 2.0 * u * v * p / r);
  return J;
}

SkewMatrix4 matrix_class2(const FuncHandle& psi, const Expr& chi, const PhaseState& s, double t,
                          const Class2Options& options) {
  return matrix_class2(psi, phi_class2_handle(psi, chi, options.lambda0, options.tol), s, t,
                       options.floors);
}

MatrixField class1_field(FuncHandle phi, Floors floors) {
  return {[phi = std::move(phi), floors](const Vec4& x, double t) {
            return matrix_class1(phi, PhaseState(x), t, floors);
          },
          MatrixClass::ClassI};
}

MatrixField class2_field(FuncHandle psi, Expr chi, Class2Options options) {
  FuncHandle phi = phi_class2_handle(psi, chi, options.lambda0, options.tol);
  return {[psi = std::move(psi), phi = std::move(phi), floors = options.floors](const Vec4& x,
                                                                               double t) {
            return matrix_class2(psi, phi, PhaseState(x), t, floors);
          },
          MatrixClass::ClassII};
}

MatrixField field_for(const SystemSpec& spec) {
  if (const auto* c2 = std::get_if<ClassII>(&spec.kind)) {
    return {[psi = c2->psi, phi = c2->phi, floors = spec.floors](const Vec4& x, double t) {
              return matrix_class2(psi, phi, PhaseState(x), t, floors);
            },
            MatrixClass::ClassII};
  }
  return class1_field(spec.phi(), spec.floors);
}

MatrixField canonical_field() {
  return {[](const Vec4&, double) {
            SkewMatrix4 J;
            J.set(kR, kU, 1.0);
            J.set(kTheta, kV, 1.0);
            return J;
          },
          MatrixClass::Canonical};
}

// ---------------------------------------------------------------- residuals

std::array<double, 4> jacobi_residuals(const MatrixField& field, const PhaseState& s, double t,
                                       double h) {
  if (!(h > 0.0)) throw PreconditionError("finite-difference step must be positive");
  if (!(s.r() - h > 0.0)) {
    throw PreconditionError("differencing stencil leaves the domain r > 0");
  }
  const bool divides_by_v = field.tag == MatrixClass::ClassI || field.tag == MatrixClass::ClassII;
  if (divides_by_v && !(std::fabs(s.v()) > h)) {
    throw PreconditionError("differencing stencil crosses v = 0");
  }
  const Vec4 x = s.coords();
  const SkewMatrix4 J = field(x, t);
  std::array<SkewMatrix4, 4> dJ;
  for (std::size_t m = 0; m < 4; ++m) {
    Vec4 plus = x;
    Vec4 minus = x;
    plus[m] += h;
    minus[m] -= h;
    SkewMatrix4 Jp;
    SkewMatrix4 Jm;
    try {
      Jp = field(plus, t);
      Jm = field(minus, t);
    } catch (const Error& e) {
      throw PreconditionError(std::string("differencing stencil leaves the admissible domain: ") +
                              e.what());
    }
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = i + 1; j < 4; ++j) dJ[m].set(i, j, (Jp(i, j) - Jm(i, j)) / (2.0 * h));
    }
  }
  static constexpr std::size_t triples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  std::array<double, 4> out{};
  for (std::size_t k = 0; k < 4; ++k) {
    const std::size_t a = triples[k][0];
    const std::size_t b = triples[k][1];
    const std::size_t c = triples[k][2];
    double sum = 0.0;
    for (std::size_t m = 0; m < 4; ++m) {
      sum += J(m, a) * dJ[m](b, c) + J(m, b) * dJ[m](c, a) + J(m, c) * dJ[m](a, b);
    }
    out[k] = sum;
  }
  return out;
}

Flow4 hamiltonian_flow(const MatrixField& field, const Vec4& gradH, const PhaseState& s,
                       double t) {
  return ermakov::apply(field(s.coords(), t), gradH);
}

double consistency_residual(const FuncHandle& psi, const FuncHandle& phi, const PhaseState& s,
                            double t, const Floors& floors) {
  if (!(std::fabs(s.u()) > floors.u_min)) {
    throw SingularStateError("u_min", "consistency condition divides by u");
  }
  const double r = s.r();
  const double alpha = s.alpha(floors.v_min);
  const FuncArgs a{alpha, r, s.theta(), t};
  const double p = psi(a);
  const double dp = psi.partial(FuncArg::Alpha, a);
  const double f = phi(a);
  const double df = phi.partial(FuncArg::Alpha, a);
  const double lhs = p * df - dp * f;
  const double rhs = psi.partial(FuncArg::R, a) +
                     s.v() / (r * r * s.u()) * psi.partial(FuncArg::Theta, a) - 2.0 / r * p;
  return lhs - rhs;
}

Vec4 casimir_residuals(const MatrixField& field, const Vec4& gradC, const PhaseState& s,
                       double t) {
  return ermakov::apply(field(s.coords(), t), gradC);
}

}  // namespace ermakov
