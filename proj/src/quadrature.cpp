#include "ermakov/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "ermakov/errors.hpp"

namespace ermakov {

namespace {

// Kronrod 15-point nodes (non-negative half) and weights; Gauss 7-point
// weights for the embedded rule on the odd-indexed nodes.
constexpr double kNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kKronrod[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kGauss[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

double sample(const std::function<double(double)>& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    throw QuadratureError("non-finite integrand sample at x = " + std::to_string(x));
  }
  return y;
}

Panel gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = sample(f, center);
  double kronrod = kKronrod[7] * fc;
  double gauss = kGauss[3] * fc;
  double abs_sum = std::fabs(kronrod);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    const double f1 = sample(f, center - dx);
    const double f2 = sample(f, center + dx);
    kronrod += kKronrod[i] * (f1 + f2);
    abs_sum += kKronrod[i] * (std::fabs(f1) + std::fabs(f2));
    if (i % 2 == 1) gauss += kGauss[i / 2] * (f1 + f2);
  }
  const double value = kronrod * half;
  double error = std::fabs((kronrod - gauss) * half);
  // Below this floor the difference is rounding noise, not truncation error.
  const double round_floor = 50.0 * std::numeric_limits<double>::epsilon() * abs_sum * std::fabs(half);
  if (error < round_floor) error = 0.0;
  return {a, b, value, error};
}

}  // namespace

double quad_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                     const QuadratureOptions& options) {
  if (!(tol > 0.0)) throw PreconditionError("quadrature tolerance must be positive");
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw PreconditionError("quadrature limits must be finite");
  }
  if (a == b) return 0.0;
  if (b < a) return -quad_adaptive(f, b, a, tol, options);

  std::priority_queue<Panel> panels;
  Panel first = gauss_kronrod(f, a, b);
  double total = first.value;
  double total_error = first.error;
  panels.push(first);

  std::size_t subdivisions = 0;
  while (total_error > tol) {
    if (subdivisions >= options.max_subdivisions) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "subdivision limit reached with estimated error %.3g > tol %.3g",
                    total_error, tol);
      throw QuadratureError(buf);
    }
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureError("interval cannot be subdivided further near x = " +
                            std::to_string(worst.a));
    }
    Panel left = gauss_kronrod(f, worst.a, mid);
    Panel right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++subdivisions;
  }

  // Re-sum to avoid the drift of the running updates.
  double sum = 0.0;
  while (!panels.empty()) {
    sum += panels.top().value;
    panels.pop();
  }
  return sum;
}

}  // namespace ermakov
