#include "ermakov/verify.hpp"

#include <algorithm>
#include <cmath>

#include "ermakov/invariants.hpp"

namespace ermakov {

namespace {

double inf_norm(const Vec4& x) {
  double m = 0.0;
  for (double c : x) m = std::max(m, std::fabs(c));
  return m;
}

SweepRow row_of(const Vec4& x) { return {x, 4, inf_norm(x)}; }

FuncArgs args_at(const PhaseState& s, double t) { return {s.u() / s.v(), s.r(), s.theta(), t}; }

}  // namespace

SweepResult run_sweep(const std::vector<SampledState>& states, const SweepKernel& kernel,
                      Execution exec) {
  SweepResult result;
  result.rows = parallel_map<SweepRow>(
      states.size(), [&](std::size_t i) { return kernel(states[i]); }, exec);
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const double v = result.rows[i].value;
    if (std::isnan(v) || v > result.max) {
      result.max = v;
      result.argmax = i;
      if (std::isnan(v)) break;
    }
  }
  return result;
}

SweepResult jacobi_sweep(const MatrixField& field, const std::vector<SampledState>& states,
                         double h, Execution exec) {
  return run_sweep(
      states,
      [&](const SampledState& p) { return row_of(jacobi_residuals(field, p.state, p.t, h)); },
      exec);
}

SweepResult flow_sweep(const SystemSpec& spec, const std::vector<SampledState>& states,
                       Execution exec) {
  return flow_sweep(spec, field_for(spec), states, exec);
}

SweepResult flow_sweep(const SystemSpec& spec, const MatrixField& field,
                       const std::vector<SampledState>& states, Execution exec) {
  return run_sweep(
      states,
      [&](const SampledState& p) {
        const Flow4 f = vector_field(spec, p.state, p.t);
        const Flow4 g = hamiltonian_flow(field, grad_ermakov(spec.G(), p.state), p.state, p.t);
        Vec4 diff{};
        for (std::size_t i = 0; i < 4; ++i) diff[i] = g[i] - f[i];
        SweepRow row = row_of(diff);
        row.value = inf_norm(diff) / std::max(inf_norm(f), 1e-300);
        return row;
      },
      exec);
}

SweepResult casimir_sweep(const MatrixField& field, const GradientFn& grad,
                          const std::vector<SampledState>& states, Execution exec) {
  return run_sweep(
      states,
      [&](const SampledState& p) {
        return row_of(casimir_residuals(field, grad(p.state, p.t), p.state, p.t));
      },
      exec);
}

SweepResult consistency_sweep(const FuncHandle& psi, const FuncHandle& phi,
                              const std::vector<SampledState>& states, const Floors& floors,
                              Execution exec) {
  return run_sweep(
      states,
      [&](const SampledState& p) {
        const double res = consistency_residual(psi, phi, p.state, p.t, floors);
        return SweepRow{{res, 0.0, 0.0, 0.0}, 1, std::fabs(res)};
      },
      exec);
}

SweepResult degeneracy_sweep(const MatrixField& field, const std::vector<SampledState>& states,
                             Execution exec) {
  return run_sweep(
      states,
      [&](const SampledState& p) {
        const SkewMatrix4 J = field(p.state.coords(), p.t);
        const double det = determinant(J);
        const double norm = J.frobenius_norm();
        return SweepRow{{det, norm, 0.0, 0.0}, 2, std::fabs(det) / std::pow(norm, 4)};
      },
      exec);
}

SweepResult determinant_sweep(const MatrixField& field, const ScalarFn& reference,
                              const std::vector<SampledState>& states, Execution exec) {
  return run_sweep(
      states,
      [&](const SampledState& p) {
        const double det = determinant(field(p.state.coords(), p.t));
        const double ref = reference(p.state, p.t);
        return SweepRow{{det, ref, 0.0, 0.0}, 2, std::fabs(det - ref) / std::fabs(ref)};
      },
      exec);
}

double class2_determinant_published(const FuncHandle& psi, const PhaseState& s, double t) {
  const double p = psi(args_at(s, t));
  const double u = s.u();
  const double v = s.v();
  const double r4 = std::pow(s.r(), 4);
  return (u * u * p / r4) * (2.0 * u / (v * v) + p);
}

double class2_determinant_pfaffian(const FuncHandle& psi, const PhaseState& s, double t) {
  const double p = psi(args_at(s, t));
  const double u = s.u();
  return u * u * p * p / std::pow(s.r(), 4);
}

}  // namespace ermakov
