#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ermakov/state.hpp"

namespace ermakov {

/// Box for seeded verification states. u is drawn from [-u_abs_max, u_abs_max]
/// with (-u_floor, u_floor) rejected; v from [v_lo, v_hi] with a random sign.
struct SamplingBox {
  double r_lo = 0.5;
  double r_hi = 3.0;
  double theta_lo = -3.141592653589793;
  double theta_hi = 3.141592653589793;
  double u_abs_max = 2.0;
  double u_floor = 1e-3;
  double v_lo = 0.5;
  double v_hi = 3.0;
  double t_lo = 0.0;
  double t_hi = 1.0;
  /// 0: either sign of -u/v; +1 or -1: u is flipped so sign(-u/v) matches.
  int branch = 0;
};

struct SampledState {
  PhaseState state{1.0, 0.0, 0.0, 1.0};
  double t = 0.0;
};

/// Deterministic for a given seed (mt19937_64).
std::vector<SampledState> sample_states(std::size_t n, std::uint64_t seed,
                                        const SamplingBox& box = {});

}  // namespace ermakov
