#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ermakov/ode.hpp"
#include "ermakov/state.hpp"
#include "ermakov/systems.hpp"

namespace ermakov {

struct Sample {
  double t;
  PhaseState state;
  Flow4 flow;
};

/// Accepted integrator steps, in integration order.
struct Trajectory {
  std::vector<Sample> samples;
  IntegratorOptions options;
  StepStats stats;

  /// Cubic Hermite dense output.
  PhaseState state_at(double t) const;
  /// First time at which theta reaches `theta` (bracketed by samples, then
  /// refined on the Hermite interpolant). Throws PreconditionError if never reached.
  double time_at_theta(double theta) const;
  std::string method_name() const;
};

/// Integrates the system flow over [t0, t1]; requires t1 > t0.
Trajectory integrate(const SystemSpec& spec, const PhaseState& s0, double t0, double t1,
                     const IntegratorOptions& options = {});

/// Integrates an arbitrary (r, theta, u, v) flow; t1 may precede t0.
Trajectory integrate_flow(const std::function<Flow4(double, const PhaseState&)>& flow,
                          const PhaseState& s0, double t0, double t1,
                          const IntegratorOptions& options = {});

struct NamedQuantity {
  std::string name;
  std::function<double(double t, const PhaseState&)> fn;
};

struct DriftEntry {
  std::string name;
  double initial = 0.0;
  /// max |Q(t) - Q(0)| / max(1, |Q(0)|)
  double max_drift = 0.0;
  double time_of_max = 0.0;
};

struct DriftReport {
  std::vector<DriftEntry> entries;
  const DriftEntry& at(const std::string& name) const;
};

DriftReport drift(const Trajectory& traj, const std::vector<NamedQuantity>& quantities);

}  // namespace ermakov
