#include "ermakov/systems.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "ermakov/errors.hpp"
#include "ermakov/poisson.hpp"

namespace ermakov {

double eval_theta_function(const Expr& e, double theta) {
  Bindings b;
  b.set(var::theta, theta);
  return e.eval(b);
}

// ---------------------------------------------------------------- Potential

Potential Potential::from_expr(Expr V) {
  require_variables(V, {var::rbar, var::t}, "pseudo potential V(rbar, t)");
  Potential p;
  p.dV = differentiate(V, var::rbar);
  p.V = std::move(V);
  p.singular_oscillator = true;
  for (double rbar : {0.31, 0.77, 1.0, 1.9, 3.7}) {
    for (double t : {0.0, 1.3}) {
      double value = 0.0;
      try {
        value = p.value(rbar, t);
      } catch (const Error&) {
        p.singular_oscillator = false;
        return p;
      }
      const double reference = 0.5 / (rbar * rbar);
      if (std::fabs(value - reference) > 1e-13 * reference) {
        p.singular_oscillator = false;
        return p;
      }
    }
  }
  return p;
}

double Potential::value(double rbar, double t) const {
  Bindings b;
  b.set(var::rbar, rbar).set(var::t, t);
  return V.eval(b);
}

double Potential::derivative(double rbar, double t) const {
  Bindings b;
  b.set(var::rbar, rbar).set(var::t, t);
  return dV.eval(b);
}

// ------------------------------------------------------ pseudo-potential phi

namespace {

class PseudoPotentialPhi final : public FuncHandle::Impl {
 public:
  PseudoPotentialPhi(Potential V, double alpha_floor)
      : V_(std::move(V)), alpha_floor_(alpha_floor) {}

  double value(const FuncArgs& a) const override {
    if (!(std::fabs(a.alpha) > alpha_floor_)) {
      throw SingularStateError("alpha_min", "pseudo-potential phi has a pole at alpha = 0");
    }
    return V_.derivative(1.0 / a.r, a.t) / (a.r * a.r * a.alpha);
  }

  double times_alpha(const FuncArgs& a) const override {
    return V_.derivative(1.0 / a.r, a.t) / (a.r * a.r);
  }

  std::optional<Expr> expr_form() const override {
    const Expr r = Expr::variable(std::string(var::r));
    const Expr alpha = Expr::variable(std::string(var::alpha));
    const Expr dV = V_.dV.substitute(var::rbar, Expr::number(1.0) / r);
    return dV / (pow(r, Expr::number(2)) * alpha);
  }

  bool depends_on(FuncArg arg) const override {
    switch (arg) {
      case FuncArg::Alpha: return true;
      case FuncArg::R: return true;
      case FuncArg::Theta: return false;
      case FuncArg::T: return V_.dV.depends_on(var::t);
    }
    return true;
  }

  std::string describe() const override {
    return "pseudo_potential_phi(V = " + print(V_.V) + ")";
  }

 private:
  Potential V_;
  double alpha_floor_;
};

}  // namespace

FuncHandle build_phi_from_potential(const Potential& V, double alpha_floor) {
  return FuncHandle::from_impl(std::make_shared<PseudoPotentialPhi>(V, alpha_floor));
}

// ---------------------------------------------------------------- SystemSpec

SystemSpec SystemSpec::class1(Expr G, FuncHandle phi, Expr F, Floors floors) {
  require_variables(G, {var::theta}, "G(theta)");
  require_variables(F, {var::theta}, "F(theta)");
  return SystemSpec{ClassI{std::move(G), std::move(F), std::move(phi)}, floors};
}

SystemSpec SystemSpec::class2(Expr G, FuncHandle psi, Expr chi, Expr F, double lambda0,
                              double quad_tol, Floors floors) {
  require_variables(G, {var::theta}, "G(theta)");
  require_variables(F, {var::theta}, "F(theta)");
  require_variables(chi, {var::r, var::theta, var::t}, "chi(r, theta, t)");
  FuncHandle phi = phi_class2_handle(psi, chi, lambda0, quad_tol);
  return SystemSpec{
      ClassII{std::move(G), std::move(F), std::move(psi), std::move(chi), lambda0, quad_tol,
              std::move(phi)},
      floors};
}

SystemSpec SystemSpec::pseudo_potential(Expr G, Expr V, Floors floors) {
  require_variables(G, {var::theta}, "G(theta)");
  return SystemSpec{PseudoPotential{std::move(G), Potential::from_expr(std::move(V))}, floors};
}

SystemClass SystemSpec::system_class() const {
  switch (kind.index()) {
    case 0: return SystemClass::ClassI;
    case 1: return SystemClass::ClassII;
    default: return SystemClass::PseudoPotential;
  }
}

const Expr& SystemSpec::G() const {
  return std::visit([](const auto& k) -> const Expr& { return k.G; }, kind);
}

Expr SystemSpec::F() const {
  if (const auto* c1 = std::get_if<ClassI>(&kind)) return c1->F;
  if (const auto* c2 = std::get_if<ClassII>(&kind)) return c2->F;
  return Expr::number(0.0);
}

FuncHandle SystemSpec::phi() const {
  if (const auto* c1 = std::get_if<ClassI>(&kind)) return c1->phi;
  if (const auto* c2 = std::get_if<ClassII>(&kind)) return c2->phi;
  return build_phi_from_potential(std::get<PseudoPotential>(kind).V);
}

SystemSpec lower_to_class1(const SystemSpec& pseudo, bool expression_phi) {
  const auto* pp = std::get_if<PseudoPotential>(&pseudo.kind);
  if (!pp) throw PreconditionError("lower_to_class1 requires a pseudo-potential system");
  FuncHandle phi = build_phi_from_potential(pp->V);
  if (expression_phi) phi = FuncHandle::from_expr(*phi.expr_form());
  return SystemSpec{ClassI{pp->G, Expr::number(0.0), std::move(phi)}, pseudo.floors};
}

// ---------------------------------------------------------------- flows

namespace {

void check_radius(const PhaseState& s, const Floors& floors) {
  if (!(s.r() > floors.r_min)) {
    throw SingularStateError("r_min", "r = " + std::to_string(s.r()) + " <= r_min");
  }
}

double checked_alpha(const PhaseState& s, const Floors& floors) { return s.alpha(floors.v_min); }

double checked_psi(const ClassII& c, const FuncArgs& a) {
  const double psi = c.psi(a);
  if (psi == 0.0) throw SingularStateError("psi", "class-II psi vanishes at the state");
  return psi;
}

// Radial acceleration and the parts of omega^2 that are not (v^2 + F)/r^4.
struct RadialTerms {
  double rddot;
  double omega2_rest;
};

RadialTerms radial_terms(const SystemSpec& spec, const PhaseState& s, double t) {
  check_radius(s, spec.floors);
  const double r = s.r();
  const double u = s.u();
  const double v = s.v();
  const double G = eval_theta_function(spec.G(), s.theta());

  if (const auto* pp = std::get_if<PseudoPotential>(&spec.kind)) {
    // Reduced form: no 0/0 at u = 0. The G term needs v only when G != 0.
    const double g_term = G == 0.0 ? 0.0 : checked_alpha(s, spec.floors) * G;
    const double dV = pp->V.derivative(1.0 / r, t);
    const double rddot = -g_term / (r * r) + v * v / (r * r) * dV;
    const double rest = g_term / (r * r * r) - v * v / (r * r * r) * dV;
    return {rddot, rest};
  }

  const double alpha = checked_alpha(s, spec.floors);
  const FuncArgs args{alpha, r, s.theta(), t};
  if (const auto* c1 = std::get_if<ClassI>(&spec.kind)) {
    const double aphi = c1->phi.times_alpha(args);
    return {-alpha * G / (r * r) + v * v * aphi, alpha * G / (r * r * r) - v * v * aphi / r};
  }
  const auto& c2 = std::get<ClassII>(spec.kind);
  const double psi = checked_psi(c2, args);
  const double phi = c2.phi(args);
  const double forcing = u * v * (phi + 2.0 * v * psi / r);
  return {-alpha * G / (r * r) + forcing, alpha * G / (r * r * r) - forcing / r};
}

}  // namespace

Flow4 vector_field(const SystemSpec& spec, const PhaseState& s, double t) {
  const RadialTerms terms = radial_terms(spec, s, t);
  const double r2 = s.r() * s.r();
  const double G = eval_theta_function(spec.G(), s.theta());
  return {s.u(), s.v() / r2, terms.rddot, -G / r2};
}

double frequency_squared(const SystemSpec& spec, const PhaseState& s, double t) {
  const RadialTerms terms = radial_terms(spec, s, t);
  const double F = eval_theta_function(spec.F(), s.theta());
  const double r2 = s.r() * s.r();
  return (s.v() * s.v() + F) / (r2 * r2) + terms.omega2_rest;
}

}  // namespace ermakov
