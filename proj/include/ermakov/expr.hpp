#pragma once

// Scalar expressions over named real variables: parsing, printing,
// evaluation, and symbolic differentiation.
//
// Grammar (lowest to highest precedence):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | identifier | identifier '(' expr ')' | '(' expr ')'

#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ermakov {

enum class UnaryOp { Neg, Sin, Cos, Tan, Exp, Ln, Sqrt, Abs };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

/// Name-to-value map for evaluation. Small and flat; lookups of names that
/// were never bound throw UnboundVariableError.
class Bindings {
 public:
  Bindings() = default;
  Bindings(std::initializer_list<std::pair<std::string, double>> init);

  Bindings& set(std::string_view name, double value);
  double get(std::string_view name) const;
  std::optional<double> find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name).has_value(); }

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

/// Immutable expression tree. Copies share structure.
class Expr {
 public:
  enum class Kind { Number, Variable, Unary, Binary };

  /// The constant 0.
  Expr();

  static Expr number(double value);  // negative values become Neg(|value|)
  static Expr variable(std::string name);
  static Expr unary(UnaryOp op, Expr arg);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

  Kind kind() const;
  double value() const;             // Number only
  const std::string& name() const;  // Variable only
  UnaryOp unary_op() const;         // Unary only
  BinaryOp binary_op() const;       // Binary only
  const Expr& arg() const;          // Unary only
  const Expr& lhs() const;          // Binary only
  const Expr& rhs() const;          // Binary only

  double eval(const Bindings& b) const;
  bool depends_on(std::string_view var) const;
  std::set<std::string> free_variables() const;

  /// Replaces every occurrence of `var` by `replacement`.
  Expr substitute(std::string_view var, const Expr& replacement) const;

  bool structurally_equal(const Expr& other) const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& a, const Expr& b);

/// Parses `text`. Throws ParseError (with byte offset) or UnknownFunctionError.
Expr parse(std::string_view text);

/// Minimal-parenthesis text form; parse(print(e)) is structurally equal to e.
std::string print(const Expr& e);

/// Unsimplified symbolic derivative d e / d var. Sub-trees that do not
/// depend on `var` are pruned to 0 rather than differentiated.
Expr differentiate(const Expr& e, std::string_view var);

/// Function vocabulary accepted by the parser.
struct FunctionEntry {
  std::string_view name;
  UnaryOp op;
};
const std::vector<FunctionEntry>& function_registry();
std::optional<UnaryOp> lookup_function(std::string_view name);
std::string_view function_name(UnaryOp op);

}  // namespace ermakov
