#pragma once

#include <array>
#include <cstddef>

namespace ermakov {

/// Coordinates are always ordered (r, theta, u, v).
using Vec4 = std::array<double, 4>;

inline constexpr std::size_t kR = 0;
inline constexpr std::size_t kTheta = 1;
inline constexpr std::size_t kU = 2;
inline constexpr std::size_t kV = 3;

/// Domain floors. The matrices divide by r, v, and (class II) u.
struct Floors {
  double v_min = 1e-12;
  double u_min = 1e-12;
  double r_min = 1e-9;
};

/// A point (r, theta, u, v) of phase space, u = dr/dt and v = r^2 dtheta/dt.
class PhaseState {
 public:
  /// Throws PreconditionError unless r > 0 and all components are finite.
  PhaseState(double r, double theta, double u, double v);
  explicit PhaseState(const Vec4& x) : PhaseState(x[0], x[1], x[2], x[3]) {}

  double r() const { return r_; }
  double theta() const { return theta_; }
  double u() const { return u_; }
  double v() const { return v_; }

  /// u / v; throws SingularStateError when |v| <= v_min.
  double alpha(double v_min = Floors{}.v_min) const;

  Vec4 coords() const { return {r_, theta_, u_, v_}; }

 private:
  double r_;
  double theta_;
  double u_;
  double v_;
};

/// Time derivatives (dr/dt, dtheta/dt, du/dt, dv/dt).
using Flow4 = Vec4;

/// r = sqrt(x^2 + y^2), theta = atan2(y, x), u = (x xdot + y ydot) / r,
/// v = x ydot - y xdot. Throws PreconditionError at the origin.
PhaseState polar_from_cartesian(double x, double y, double xdot, double ydot);

/// Inverse of polar_from_cartesian: returns (x, y, xdot, ydot).
Vec4 cartesian_from_polar(const PhaseState& s);

}  // namespace ermakov
