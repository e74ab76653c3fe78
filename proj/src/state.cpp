#include "ermakov/state.hpp"

#include <cmath>

#include "ermakov/errors.hpp"

namespace ermakov {

PhaseState::PhaseState(double r, double theta, double u, double v)
    : r_(r), theta_(theta), u_(u), v_(v) {
  if (!std::isfinite(r) || !std::isfinite(theta) || !std::isfinite(u) || !std::isfinite(v)) {
    throw PreconditionError("phase state has a non-finite component");
  }
  if (!(r > 0.0)) throw PreconditionError("phase state requires r > 0");
}

double PhaseState::alpha(double v_min) const {
  if (!(std::fabs(v_) > v_min)) {
    throw SingularStateError("v_min", "alpha = u/v undefined for |v| <= v_min");
  }
  return u_ / v_;
}

PhaseState polar_from_cartesian(double x, double y, double xdot, double ydot) {
  const double r = std::hypot(x, y);
  if (!(r > 0.0)) throw PreconditionError("polar coordinates undefined at the origin");
  return PhaseState(r, std::atan2(y, x), (x * xdot + y * ydot) / r, x * ydot - y * xdot);
}

Vec4 cartesian_from_polar(const PhaseState& s) {
  const double c = std::cos(s.theta());
  const double sn = std::sin(s.theta());
  const double thetadot = s.v() / (s.r() * s.r());
  return {s.r() * c, s.r() * sn, s.u() * c - s.r() * sn * thetadot,
          s.u() * sn + s.r() * c * thetadot};
}

}  // namespace ermakov
