#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "ermakov/parallel.hpp"
#include "ermakov/poisson.hpp"
#include "ermakov/sampling.hpp"
#include "ermakov/systems.hpp"

namespace ermakov {

/// Per-state outcome of a residual suite. `value` is the scalar compared
/// against the tolerance; `components` holds up to four raw residuals.
struct SweepRow {
  std::array<double, 4> components{};
  std::size_t width = 1;
  double value = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double max = 0.0;
  std::size_t argmax = 0;
};

using SweepKernel = std::function<SweepRow(const SampledState&)>;

SweepResult run_sweep(const std::vector<SampledState>& states, const SweepKernel& kernel,
                      Execution exec = Execution::Parallel);

/// max |Jacobi residual| per state.
SweepResult jacobi_sweep(const MatrixField& field, const std::vector<SampledState>& states,
                         double h = 1e-5, Execution exec = Execution::Parallel);

/// |J grad I - f|_inf / |f|_inf per state.
SweepResult flow_sweep(const SystemSpec& spec, const std::vector<SampledState>& states,
                       Execution exec = Execution::Parallel);
/// As above with an explicit matrix field in place of field_for(spec).
SweepResult flow_sweep(const SystemSpec& spec, const MatrixField& field,
                       const std::vector<SampledState>& states,
                       Execution exec = Execution::Parallel);

using GradientFn = std::function<Vec4(const PhaseState&, double)>;

/// |J grad C|_inf per state.
SweepResult casimir_sweep(const MatrixField& field, const GradientFn& grad,
                          const std::vector<SampledState>& states,
                          Execution exec = Execution::Parallel);

/// |consistency residual| per state.
SweepResult consistency_sweep(const FuncHandle& psi, const FuncHandle& phi,
                              const std::vector<SampledState>& states, const Floors& floors = {},
                              Execution exec = Execution::Parallel);

/// |det J| / |J|_F^4 per state.
SweepResult degeneracy_sweep(const MatrixField& field, const std::vector<SampledState>& states,
                             Execution exec = Execution::Parallel);

using ScalarFn = std::function<double(const PhaseState&, double)>;

/// |det J - reference| / |reference| per state; components hold (det, reference).
SweepResult determinant_sweep(const MatrixField& field, const ScalarFn& reference,
                              const std::vector<SampledState>& states,
                              Execution exec = Execution::Parallel);

/// (u^2 psi / r^4) (2u / v^2 + psi), the published class-II determinant.
double class2_determinant_published(const FuncHandle& psi, const PhaseState& s, double t);
/// u^2 psi^2 / r^4, the square of the class-II Pfaffian -u psi / r^2.
double class2_determinant_pfaffian(const FuncHandle& psi, const PhaseState& s, double t);

}  // namespace ermakov
