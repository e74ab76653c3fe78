#include "ermakov/func_handle.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ermakov/errors.hpp"
#include "ermakov/finite_difference.hpp"

namespace ermakov {

namespace {

double& slot(FuncArgs& a, FuncArg arg) {
  switch (arg) {
    case FuncArg::Alpha: return a.alpha;
    case FuncArg::R: return a.r;
    case FuncArg::Theta: return a.theta;
    case FuncArg::T: return a.t;
  }
  return a.t;
}

std::string_view arg_name(FuncArg arg) {
  switch (arg) {
    case FuncArg::Alpha: return var::alpha;
    case FuncArg::R: return var::r;
    case FuncArg::Theta: return var::theta;
    case FuncArg::T: return var::t;
  }
  return var::t;
}

Bindings bind(const FuncArgs& a) {
  Bindings b;
  b.set(var::alpha, a.alpha).set(var::r, a.r).set(var::theta, a.theta).set(var::t, a.t);
  return b;
}

// Half-width of the symmetric probe used to resolve alpha * phi at alpha = 0.
constexpr double kAlphaLimitProbe = 1e-7;

class ExprImpl final : public FuncHandle::Impl {
 public:
  explicit ExprImpl(Expr e)
      : e_(std::move(e)),
        d_{differentiate(e_, var::alpha), differentiate(e_, var::r),
           differentiate(e_, var::theta), differentiate(e_, var::t)} {}

  double value(const FuncArgs& a) const override { return e_.eval(bind(a)); }

  double partial(FuncArg arg, const FuncArgs& a) const override {
    return d_[static_cast<int>(arg)].eval(bind(a));
  }

  std::optional<Expr> expr_form() const override { return e_; }
  bool depends_on(FuncArg arg) const override { return e_.depends_on(arg_name(arg)); }
  std::string describe() const override { return print(e_); }

 private:
  Expr e_;
  std::array<Expr, 4> d_;
};

}  // namespace

double FuncHandle::Impl::times_alpha(const FuncArgs& a) const {
  if (a.alpha != 0.0) return a.alpha * value(a);
  try {
    return 0.0 * value(a);
  } catch (const DomainError&) {
    FuncArgs plus = a;
    FuncArgs minus = a;
    plus.alpha = kAlphaLimitProbe;
    minus.alpha = -kAlphaLimitProbe;
    const double above = kAlphaLimitProbe * value(plus);
    const double below = -kAlphaLimitProbe * value(minus);
    if (!(std::fabs(above - below) <= 1e-6 * std::max(1.0, std::fabs(above) + std::fabs(below)))) {
      throw DomainError("alpha * phi has no limit at alpha = 0");
    }
    return 0.5 * (above + below);
  }
}

double FuncHandle::Impl::partial(FuncArg arg, const FuncArgs& a) const {
  FuncArgs probe = a;
  const double x0 = slot(probe, arg);
  const double h = 1e-4 * std::max(1.0, std::fabs(x0));
  return central_difference4(
      [&](double x) {
        slot(probe, arg) = x;
        return value(probe);
      },
      x0, h);
}

FuncHandle::FuncHandle() : FuncHandle(from_expr(Expr::number(0.0))) {}

FuncHandle FuncHandle::from_expr(Expr e) {
  require_variables(e, {var::alpha, var::r, var::theta, var::t}, "function of (alpha, r, theta, t)");
  return FuncHandle(std::make_shared<ExprImpl>(std::move(e)));
}

FuncHandle FuncHandle::from_impl(std::shared_ptr<const Impl> impl) {
  if (!impl) throw PreconditionError("null function implementation");
  return FuncHandle(std::move(impl));
}

void require_variables(const Expr& e, std::initializer_list<std::string_view> allowed,
                       std::string_view role) {
  for (const auto& name : e.free_variables()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || name == a;
    if (!ok) {
      std::string list;
      for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
      throw ConfigError("variable '" + name + "' is not allowed in " + std::string(role) +
                        " (allowed: " + list + ")");
    }
  }
}

}  // namespace ermakov
