#pragma once

// Explicit Runge-Kutta integrators: classical fixed-step RK4 and the
// Dormand-Prince 5(4) pair with PI step control. Integration may run in
// either time direction; accepted nodes keep their derivatives for cubic
// Hermite dense output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ermakov/errors.hpp"

namespace ermakov {

enum class Method { RK4, DormandPrince45 };

struct IntegratorOptions {
  Method method = Method::DormandPrince45;
  double dt = 1e-2;  // RK4 step (the span is split into equal steps <= dt)
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

template <std::size_t N>
struct OdeNode {
  double t;
  std::array<double, N> y;
  std::array<double, N> dy;
};

template <std::size_t N>
std::array<double, N> hermite(const OdeNode<N>& a, const OdeNode<N>& b, double t) {
  const double h = b.t - a.t;
  const double s = (t - a.t) / h;
  const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  const double h10 = s * (1.0 - s) * (1.0 - s);
  const double h01 = s * s * (3.0 - 2.0 * s);
  const double h11 = s * s * (s - 1.0);
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = h00 * a.y[i] + h10 * h * a.dy[i] + h01 * b.y[i] + h11 * h * b.dy[i];
  }
  return out;
}

template <std::size_t N>
struct OdeSolution {
  std::vector<OdeNode<N>> nodes;
  StepStats stats;

  /// Cubic Hermite interpolation between accepted nodes.
  std::array<double, N> at(double t) const {
    if (nodes.empty()) throw PreconditionError("empty solution");
    const bool forward = nodes.back().t >= nodes.front().t;
    const double lo = forward ? nodes.front().t : nodes.back().t;
    const double hi = forward ? nodes.back().t : nodes.front().t;
    if (t < lo || t > hi) throw PreconditionError("dense output requested outside the span");
    auto it = std::lower_bound(nodes.begin(), nodes.end(), t,
                               [forward](const OdeNode<N>& n, double x) {
                                 return forward ? n.t < x : n.t > x;
                               });
    if (it == nodes.begin()) return nodes.front().y;
    if (it == nodes.end()) return nodes.back().y;
    return hermite(*(it - 1), *it, t);
  }
};

template <std::size_t N>
using OdeRhs = std::function<std::array<double, N>(double, const std::array<double, N>&)>;

namespace detail {

template <std::size_t N>
std::array<double, 4> pad(const std::array<double, N>& y) {
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < std::min<std::size_t>(N, 4); ++i) out[i] = y[i];
  return out;
}

template <std::size_t N>
std::array<double, N> axpy(const std::array<double, N>& y, double h,
                           std::initializer_list<std::pair<double, const std::array<double, N>*>> terms) {
  std::array<double, N> out = y;
  for (const auto& [c, k] : terms) {
    if (c == 0.0) continue;
    for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
  }
  return out;
}

template <std::size_t N>
OdeSolution<N> solve_rk4(const OdeRhs<N>& f, std::array<double, N> y, double t0, double t1,
                         const IntegratorOptions& opt) {
  if (!(opt.dt > 0.0)) throw PreconditionError("RK4 step dt must be positive");
  OdeSolution<N> sol;
  const double span = t1 - t0;
  const auto steps = static_cast<std::size_t>(std::ceil(std::fabs(span) / opt.dt - 1e-9));
  const std::size_t n = std::max<std::size_t>(steps, 1);
  const double h = span / static_cast<double>(n);
  double t = t0;
  auto eval = [&](double tt, const std::array<double, N>& yy) {
    ++sol.stats.rhs_evals;
    try {
      return f(tt, yy);
    } catch (const Error& e) {
      throw IntegrationError(std::string("integration stopped: ") + e.what(), t, pad(y));
    }
  };
  std::array<double, N> k1 = eval(t, y);
  sol.nodes.push_back({t, y, k1});
  for (std::size_t step = 0; step < n; ++step) {
    const auto k2 = eval(t + 0.5 * h, axpy<N>(y, h, {{0.5, &k1}}));
    const auto k3 = eval(t + 0.5 * h, axpy<N>(y, h, {{0.5, &k2}}));
    const auto k4 = eval(t + h, axpy<N>(y, h, {{1.0, &k3}}));
    y = axpy<N>(y, h, {{1.0 / 6.0, &k1}, {1.0 / 3.0, &k2}, {1.0 / 3.0, &k3}, {1.0 / 6.0, &k4}});
    t = step + 1 == n ? t1 : t0 + static_cast<double>(step + 1) * h;
    k1 = eval(t, y);
    sol.nodes.push_back({t, y, k1});
    ++sol.stats.accepted;
  }
  return sol;
}

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Difference between the 5th- and 4th-order weights.
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

template <std::size_t N>
double error_norm(const std::array<double, N>& err, const std::array<double, N>& y0,
                  const std::array<double, N>& y1, const IntegratorOptions& opt) {
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double scale = opt.atol + opt.rtol * std::max(std::fabs(y0[i]), std::fabs(y1[i]));
    const double q = err[i] / scale;
    sum += q * q;
  }
  return std::sqrt(sum / static_cast<double>(N));
}

template <std::size_t N>
OdeSolution<N> solve_dopri(const OdeRhs<N>& f, std::array<double, N> y, double t0, double t1,
                           const IntegratorOptions& opt) {
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) {
    throw PreconditionError("adaptive tolerances must be positive");
  }
  OdeSolution<N> sol;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  double t = t0;
  auto eval = [&](double tt, const std::array<double, N>& yy) {
    ++sol.stats.rhs_evals;
    return f(tt, yy);
  };
  std::array<double, N> k1;
  try {
    k1 = eval(t, y);
  } catch (const Error& e) {
    throw IntegrationError(std::string("initial state rejected: ") + e.what(), t, pad(y));
  }
  sol.nodes.push_back({t, y, k1});

  // Starting step (Hairer, Norsett & Wanner II.4).
  auto scaled_norm = [&](const std::array<double, N>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double q = x[i] / (opt.atol + opt.rtol * std::fabs(y[i]));
      s += q * q;
    }
    return std::sqrt(s / static_cast<double>(N));
  };
  double h = 0.0;
  {
    const double d0 = scaled_norm(y);
    const double d1 = scaled_norm(k1);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, std::fabs(t1 - t0));
    double h1 = h0;
    try {
      const auto y1 = axpy<N>(y, dir * h0, {{1.0, &k1}});
      const auto f1 = eval(t + dir * h0, y1);
      std::array<double, N> df{};
      for (std::size_t i = 0; i < N; ++i) df[i] = f1[i] - k1[i];
      const double d2 = scaled_norm(df) / h0;
      const double dm = std::max(d1, d2);
      h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    } catch (const Error&) {
      h1 = h0 * 1e-3;
    }
    h = std::min({100.0 * h0, h1, opt.h_max, std::fabs(t1 - t0)});
  }

  constexpr double safety = 0.9;
  constexpr double beta = 0.04;
  constexpr double alpha = 0.2 - 0.75 * beta;
  double err_prev = 1e-4;
  bool last_rejected = false;
  std::string last_failure;

  while (dir * (t1 - t) > 0.0) {
    if (sol.stats.accepted + sol.stats.rejected >= opt.max_steps) {
      throw IntegrationError("maximum number of steps exceeded", t, pad(y));
    }
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(t))) {
      throw IntegrationError(
          "step size underflow at t = " + std::to_string(t) +
              (last_failure.empty() ? std::string() : " (" + last_failure + ")"),
          t, pad(y));
    }
    bool last = false;
    if (h >= std::fabs(t1 - t)) {
      h = std::fabs(t1 - t);
      last = true;
    }
    const double hs = dir * h;
    std::array<double, N> y_new;
    std::array<double, N> k7;
    double err = 0.0;
    try {
      const auto k2 = eval(t + c2 * hs, axpy<N>(y, hs, {{a21, &k1}}));
      const auto k3 = eval(t + c3 * hs, axpy<N>(y, hs, {{a31, &k1}, {a32, &k2}}));
      const auto k4 = eval(t + c4 * hs, axpy<N>(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const auto k5 =
          eval(t + c5 * hs, axpy<N>(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const auto k6 = eval(t + hs, axpy<N>(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4},
                                                   {a65, &k5}}));
      y_new = axpy<N>(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      const double t_new = last ? t1 : t + hs;
      k7 = eval(t_new, y_new);
      std::array<double, N> e{};
      for (std::size_t i = 0; i < N; ++i) {
        e[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      }
      err = error_norm<N>(e, y, y_new, opt);
      if (!std::isfinite(err)) throw DomainError("non-finite error estimate");
    } catch (const IntegrationError&) {
      throw;
    } catch (const Error& e) {
      // A stage left the admissible domain: shrink and retry.
      last_failure = e.what();
      ++sol.stats.rejected;
      h *= 0.25;
      last_rejected = true;
      continue;
    }

    if (err <= 1.0) {
      t = last ? t1 : t + hs;
      y = y_new;
      k1 = k7;
      sol.nodes.push_back({t, y, k1});
      ++sol.stats.accepted;
      double factor = err == 0.0 ? 5.0
                                 : safety * std::pow(err, -alpha) * std::pow(err_prev, beta);
      factor = std::clamp(factor, 0.2, last_rejected ? 1.0 : 5.0);
      err_prev = std::max(err, 1e-4);
      h = std::min(h * factor, opt.h_max);
      last_rejected = false;
      last_failure.clear();
    } else {
      ++sol.stats.rejected;
      h *= std::max(0.2, safety * std::pow(err, -0.2));
      last_rejected = true;
    }
  }
  return sol;
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 to t1 (either direction).
template <std::size_t N>
OdeSolution<N> solve_ode(const OdeRhs<N>& f, const std::array<double, N>& y0, double t0,
                         double t1, const IntegratorOptions& options) {
  if (t0 == t1) throw PreconditionError("empty integration span");
  if (options.method == Method::RK4) return detail::solve_rk4<N>(f, y0, t0, t1, options);
  return detail::solve_dopri<N>(f, y0, t0, t1, options);
}

}  // namespace ermakov
