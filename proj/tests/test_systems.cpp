#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ermakov/errors.hpp"
#include "ermakov/sampling.hpp"
#include "ermakov/systems.hpp"

using namespace ermakov;

namespace {

FuncHandle fexpr(const char* text) { return FuncHandle::from_expr(parse(text)); }

void expect_flow(const Flow4& got, const Flow4& want, double tol = 1e-14) {
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(got[i], want[i], tol) << "component " << i;
}

}  // namespace

TEST(PhaseState, Invariants) {
  EXPECT_THROW(PhaseState(0.0, 0.0, 0.0, 1.0), PreconditionError);
  EXPECT_THROW(PhaseState(-1.0, 0.0, 0.0, 1.0), PreconditionError);
  EXPECT_THROW(PhaseState(1.0, NAN, 0.0, 1.0), PreconditionError);
  const PhaseState s(1.0, 0.0, 0.5, 1e-13);
  try {
    s.alpha();
    FAIL();
  } catch (const SingularStateError& e) {
    EXPECT_EQ(e.floor(), "v_min");
  }
  EXPECT_DOUBLE_EQ(s.alpha(1e-14), 0.5 / 1e-13);
}

TEST(VectorField, Examples) {
  const auto free = SystemSpec::class1(parse("0"), fexpr("0"));
  expect_flow(vector_field(free, PhaseState(2, 0, 1, 4), 0.0), {1, 1, 0, 0});

  const auto spiral = SystemSpec::pseudo_potential(parse("0"), parse("1/(2*rbar^2)"));
  expect_flow(vector_field(spiral, PhaseState(1, 0, 0, 1), 0.0), {0, 1, -1, 0});

  const auto c2 = SystemSpec::class2(parse("0"), fexpr("1"), parse("0"));
  expect_flow(vector_field(c2, PhaseState(1, 0, 1, 1), 0.0), {1, 1, 0, 0}, 1e-12);
}

TEST(VectorField, ClassTwoRejectsVanishingPsi) {
  const auto c2 = SystemSpec::class2(parse("0"), fexpr("r - 1"), parse("0"));
  EXPECT_THROW(vector_field(c2, PhaseState(1, 0, 1, 1), 0.0), Error);
}

TEST(VectorField, NamesTheFloor) {
  const auto c1 = SystemSpec::class1(parse("1"), fexpr("alpha"));
  try {
    vector_field(c1, PhaseState(1, 0, 1, 0.0), 0.0);
    FAIL();
  } catch (const SingularStateError& e) {
    EXPECT_EQ(e.floor(), "v_min");
  }
}

TEST(FrequencySquared, Examples) {
  const auto free = SystemSpec::class1(parse("0"), fexpr("0"));
  EXPECT_DOUBLE_EQ(frequency_squared(free, PhaseState(1, 0, 0, 2), 0.0), 4.0);
  const auto withF = SystemSpec::class1(parse("0"), fexpr("0"), parse("3"));
  EXPECT_DOUBLE_EQ(frequency_squared(withF, PhaseState(1, 0, 0, 2), 0.0), 7.0);
  EXPECT_EQ(vector_field(withF, PhaseState(1, 0, 0, 2), 0.0),
            vector_field(free, PhaseState(1, 0, 0, 2), 0.0));
  const auto spiral = SystemSpec::pseudo_potential(parse("0"), parse("1/(2*rbar^2)"));
  EXPECT_DOUBLE_EQ(frequency_squared(spiral, PhaseState(1, 0, 0, 1), 0.0), 2.0);
}

namespace {

std::vector<SystemSpec> spec_pool(const char* F) {
  return {
      SystemSpec::class1(parse("cos(theta)"), fexpr("sin(theta)*alpha"), parse(F)),
      SystemSpec::class1(parse("1"), fexpr("r^2*t"), parse(F)),
      SystemSpec::class1(parse("0"), fexpr("-r/alpha"), parse(F)),
      SystemSpec::class2(parse("cos(theta)"), fexpr("1"), parse("0"), parse(F)),
      SystemSpec::class2(parse("1"), fexpr("2"), parse("r*theta"), parse(F)),
      SystemSpec::class2(parse("sin(theta)"), fexpr("1+alpha^2"), parse("r"), parse(F)),
  };
}

}  // namespace

TEST(VectorField, IndependentOfF) {
  const auto a = spec_pool("0");
  const auto b = spec_pool("3 + sin(theta)^2");
  for (const auto& p : sample_states(200, 11)) {
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(vector_field(a[k], p.state, p.t), vector_field(b[k], p.state, p.t));
    }
  }
}

TEST(VectorField, AngularMomentumLaw) {
  for (const auto& spec : spec_pool("0")) {
    for (const auto& p : sample_states(100, 12)) {
      const double r = p.state.r();
      EXPECT_EQ(vector_field(spec, p.state, p.t)[kV],
                -eval_theta_function(spec.G(), p.state.theta()) / (r * r));
    }
  }
}

TEST(FrequencySquared, ReconstructsRadialAcceleration) {
  for (const auto& spec : spec_pool("1 + cos(theta)^2")) {
    for (const auto& p : sample_states(1000, 13)) {
      const PhaseState& s = p.state;
      const double w2 = frequency_squared(spec, s, p.t);
      const double F = eval_theta_function(spec.F(), s.theta());
      const double rebuilt = -w2 * s.r() + (s.v() * s.v() + F) / std::pow(s.r(), 3);
      const double udot = vector_field(spec, s, p.t)[kU];
      EXPECT_LE(std::fabs(rebuilt - udot), 1e-12 * std::max(std::fabs(udot), std::fabs(w2 * s.r())));
    }
  }
}

TEST(BuildPhi, Examples) {
  const FuncHandle phi = build_phi_from_potential(Potential::from_expr(parse("1/(2*rbar^2)")));
  EXPECT_NEAR(phi({1.0, 1.0, 0.0, 0.0}), -1.0, 1e-15);
  const FuncHandle zero = build_phi_from_potential(Potential::from_expr(parse("5")));
  EXPECT_EQ(zero({0.3, 1.2, 0.1, 0.0}), 0.0);
  const FuncHandle lin = build_phi_from_potential(Potential::from_expr(parse("rbar")));
  EXPECT_NEAR(lin({2.0, 2.0, 0.0, 0.0}), 0.125, 1e-16);
}

TEST(BuildPhi, AlphaFloorIsAnError) {
  const FuncHandle phi = build_phi_from_potential(Potential::from_expr(parse("1/(2*rbar^2)")));
  EXPECT_THROW(phi({0.0, 1.0, 0.0, 0.0}), SingularStateError);
  EXPECT_DOUBLE_EQ(phi.times_alpha({0.0, 2.0, 0.0, 0.0}), -2.0);
}

TEST(BuildPhi, BuiltinAgreesWithExpressionPath) {
  for (const char* V : {"1/(2*rbar^2)", "rbar^3 - rbar", "exp(-rbar)*t", "sin(rbar)"}) {
    const Potential pot = Potential::from_expr(parse(V));
    const FuncHandle builtin = build_phi_from_potential(pot);
    const FuncHandle expr = FuncHandle::from_expr(*builtin.expr_form());
    for (const auto& p : sample_states(300, 14)) {
      const FuncArgs a{p.state.alpha(), p.state.r(), p.state.theta(), p.t};
      EXPECT_LE(std::fabs(builtin(a) - expr(a)), 1e-12 * std::max(1.0, std::fabs(expr(a)))) << V;
    }
  }
}

TEST(Potential, RecognizesSingularOscillator) {
  EXPECT_TRUE(Potential::from_expr(parse("1/(2*rbar^2)")).singular_oscillator);
  EXPECT_TRUE(Potential::from_expr(parse("0.5*rbar^(-2)")).singular_oscillator);
  EXPECT_FALSE(Potential::from_expr(parse("1/rbar^2")).singular_oscillator);
  EXPECT_THROW(Potential::from_expr(parse("r*rbar")), ConfigError);
}

TEST(PseudoPotential, LoweringMatchesReducedForm) {
  for (const char* V : {"1/(2*rbar^2)", "rbar^2/2 + 1/(2*rbar^2)"}) {
    const auto pp = SystemSpec::pseudo_potential(parse("cos(theta)"), parse(V));
    for (bool expression : {false, true}) {
      const auto c1 = lower_to_class1(pp, expression);
      for (const auto& p : sample_states(1000, 15)) {
        if (std::fabs(p.state.u()) <= 1e-6) continue;
        const Flow4 a = vector_field(pp, p.state, p.t);
        const Flow4 b = vector_field(c1, p.state, p.t);
        for (std::size_t i = 0; i < 4; ++i) {
          EXPECT_LE(std::fabs(a[i] - b[i]), 1e-10 * std::max(1.0, std::fabs(a[i]))) << V;
        }
      }
    }
  }
}

TEST(Polar, Examples) {
  const PhaseState a = polar_from_cartesian(1, 0, 0, 1);
  EXPECT_EQ(a.coords(), (Vec4{1, 0, 0, 1}));
  const PhaseState b = polar_from_cartesian(0, 2, 1, 0);
  EXPECT_DOUBLE_EQ(b.r(), 2.0);
  EXPECT_DOUBLE_EQ(b.theta(), M_PI / 2);
  EXPECT_DOUBLE_EQ(b.u(), 0.0);
  EXPECT_DOUBLE_EQ(b.v(), -2.0);
  const PhaseState c = polar_from_cartesian(3, 4, 1, 1);
  EXPECT_DOUBLE_EQ(c.r(), 5.0);
  EXPECT_DOUBLE_EQ(c.theta(), std::atan2(4.0, 3.0));
  EXPECT_DOUBLE_EQ(c.u(), 7.0 / 5.0);
  EXPECT_DOUBLE_EQ(c.v(), -1.0);
  const Vec4 back = cartesian_from_polar(c);
  const Vec4 want{3, 4, 1, 1};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(back[i], want[i], 1e-14);
  EXPECT_THROW(polar_from_cartesian(0, 0, 1, 1), PreconditionError);
}

TEST(SystemSpec, RejectsForeignVariables) {
  EXPECT_THROW(SystemSpec::class1(parse("r"), fexpr("0")), ConfigError);
  EXPECT_THROW(fexpr("rbar"), ConfigError);
  EXPECT_THROW(SystemSpec::pseudo_potential(parse("0"), parse("theta")), ConfigError);
}
