#include "ermakov/integrate.hpp"

#include <cmath>

#include "ermakov/errors.hpp"

namespace ermakov {

namespace {

Trajectory from_solution(const OdeSolution<4>& sol, const IntegratorOptions& options) {
  Trajectory traj;
  traj.options = options;
  traj.stats = sol.stats;
  traj.samples.reserve(sol.nodes.size());
  for (const auto& node : sol.nodes) {
    traj.samples.push_back({node.t, PhaseState(node.y), node.dy});
  }
  return traj;
}

OdeNode<4> as_node(const Sample& s) { return {s.t, s.state.coords(), s.flow}; }

}  // namespace

Trajectory integrate_flow(const std::function<Flow4(double, const PhaseState&)>& flow,
                          const PhaseState& s0, double t0, double t1,
                          const IntegratorOptions& options) {
  const OdeRhs<4> rhs = [&flow](double t, const Vec4& x) {
    if (!(x[kR] > 0.0) || !std::isfinite(x[kR])) {
      throw SingularStateError("r_min", "radius left the domain r > 0");
    }
    return flow(t, PhaseState(x));
  };
  return from_solution(solve_ode<4>(rhs, s0.coords(), t0, t1, options), options);
}

Trajectory integrate(const SystemSpec& spec, const PhaseState& s0, double t0, double t1,
                     const IntegratorOptions& options) {
  if (!(t1 > t0)) throw PreconditionError("integrate requires t1 > t0");
  return integrate_flow(
      [&spec](double t, const PhaseState& s) { return vector_field(spec, s, t); }, s0, t0, t1,
      options);
}

PhaseState Trajectory::state_at(double t) const {
  OdeSolution<4> sol;
  sol.nodes.reserve(samples.size());
  for (const auto& s : samples) sol.nodes.push_back(as_node(s));
  return PhaseState(sol.at(t));
}

double Trajectory::time_at_theta(double theta) const {
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const double a = samples[i].state.theta() - theta;
    const double b = samples[i + 1].state.theta() - theta;
    if (a == 0.0) return samples[i].t;
    if ((a < 0.0) != (b < 0.0) || b == 0.0) {
      const OdeNode<4> na = as_node(samples[i]);
      const OdeNode<4> nb = as_node(samples[i + 1]);
      double lo = na.t;
      double hi = nb.t;
      double flo = a;
      for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = hermite(na, nb, mid)[kTheta] - theta;
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
  }
  throw PreconditionError("trajectory never reaches theta = " + std::to_string(theta));
}

std::string Trajectory::method_name() const {
  return options.method == Method::RK4 ? "rk4" : "dopri45";
}

const DriftEntry& DriftReport::at(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return e;
  }
  throw PreconditionError("no drift entry named '" + name + "'");
}

DriftReport drift(const Trajectory& traj, const std::vector<NamedQuantity>& quantities) {
  if (traj.samples.empty()) throw PreconditionError("empty trajectory");
  DriftReport report;
  for (const auto& q : quantities) {
    DriftEntry entry;
    entry.name = q.name;
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
      const Sample& s = traj.samples[i];
      double value = 0.0;
      try {
        value = q.fn(s.t, s.state);
      } catch (const Error& e) {
        throw Error("quantity '" + q.name + "' failed at sample " + std::to_string(i) + ": " +
                    e.what());
      }
      if (i == 0) {
        entry.initial = value;
        entry.time_of_max = s.t;
        continue;
      }
      const double d = std::fabs(value - entry.initial) / std::max(1.0, std::fabs(entry.initial));
      if (d > entry.max_drift) {
        entry.max_drift = d;
        entry.time_of_max = s.t;
      }
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace ermakov
