#include "ermakov/sampling.hpp"

#include <cmath>
#include <random>

#include "ermakov/errors.hpp"

namespace ermakov {

std::vector<SampledState> sample_states(std::size_t n, std::uint64_t seed, const SamplingBox& box) {
  if (!(box.u_floor < box.u_abs_max)) throw PreconditionError("u_floor must be below u_abs_max");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  std::vector<SampledState> out;
  out.reserve(n);
  while (out.size() < n) {
    const double r = draw(box.r_lo, box.r_hi);
    const double theta = draw(box.theta_lo, box.theta_hi);
    double u = draw(-box.u_abs_max, box.u_abs_max);
    double v = draw(box.v_lo, box.v_hi);
    if (unit(rng) < 0.5) v = -v;
    const double t = draw(box.t_lo, box.t_hi);
    if (std::abs(u) < box.u_floor) continue;
    if (box.branch != 0) {
      const bool want_positive = box.branch > 0;  // -u/v > 0
      if ((-u / v > 0.0) != want_positive) u = -u;
    }
    out.push_back({PhaseState(r, theta, u, v), t});
  }
  return out;
}

}  // namespace ermakov
