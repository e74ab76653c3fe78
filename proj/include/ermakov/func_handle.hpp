#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "ermakov/expr.hpp"

namespace ermakov {

// Fixed variable names per role.
namespace var {
inline constexpr std::string_view theta = "theta";
inline constexpr std::string_view r = "r";
inline constexpr std::string_view t = "t";
inline constexpr std::string_view alpha = "alpha";  // u / v
inline constexpr std::string_view rbar = "rbar";    // 1 / r
inline constexpr std::string_view lambda = "lambda";
}  // namespace var

enum class FuncArg { Alpha, R, Theta, T };

struct FuncArgs {
  double alpha;
  double r;
  double theta;
  double t;
};

/// A scalar function of (alpha, r, theta, t): either a parsed expression or
/// a builtin closed form (see build_phi_from_potential, phi_class2_handle).
class FuncHandle {
 public:
  class Impl {
   public:
    virtual ~Impl() = default;
    virtual double value(const FuncArgs& a) const = 0;
    /// alpha * value(a), with removable 0/0 at alpha = 0 resolved.
    virtual double times_alpha(const FuncArgs& a) const;
    virtual double partial(FuncArg arg, const FuncArgs& a) const;
    virtual std::optional<Expr> expr_form() const { return std::nullopt; }
    virtual bool depends_on(FuncArg) const { return true; }
    virtual std::string describe() const = 0;
  };

  /// The zero function.
  FuncHandle();
  /// Throws ConfigError if `e` uses variables other than alpha, r, theta, t.
  static FuncHandle from_expr(Expr e);
  static FuncHandle from_impl(std::shared_ptr<const Impl> impl);

  double operator()(const FuncArgs& a) const { return impl_->value(a); }
  double times_alpha(const FuncArgs& a) const { return impl_->times_alpha(a); }
  double partial(FuncArg arg, const FuncArgs& a) const { return impl_->partial(arg, a); }
  bool depends_on(FuncArg arg) const { return impl_->depends_on(arg); }

  /// Expression equivalent, when one exists (always for expression handles).
  std::optional<Expr> expr_form() const { return impl_->expr_form(); }
  std::string describe() const { return impl_->describe(); }

 private:
  explicit FuncHandle(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Checks that `e` only uses variables from `allowed`; throws ConfigError
/// naming `role` otherwise.
void require_variables(const Expr& e, std::initializer_list<std::string_view> allowed,
                       std::string_view role);

}  // namespace ermakov
