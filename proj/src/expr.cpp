#include "ermakov/expr.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "ermakov/errors.hpp"

namespace ermakov {

// ---------------------------------------------------------------- Bindings

Bindings::Bindings(std::initializer_list<std::pair<std::string, double>> init) {
  for (const auto& [name, value] : init) set(name, value);
}

Bindings& Bindings::set(std::string_view name, double value) {
  for (auto& entry : entries_) {
    if (entry.first == name) {
      entry.second = value;
      return *this;
    }
  }
  entries_.emplace_back(std::string(name), value);
  return *this;
}

std::optional<double> Bindings::find(std::string_view name) const {
  for (const auto& entry : entries_) {
    if (entry.first == name) return entry.second;
  }
  return std::nullopt;
}

double Bindings::get(std::string_view name) const {
  if (auto v = find(name)) return *v;
  throw UnboundVariableError(std::string(name));
}

// ---------------------------------------------------------------- nodes

struct Expr::Node {
  Kind kind = Kind::Number;
  double value = 0.0;
  std::string name;
  UnaryOp uop = UnaryOp::Neg;
  BinaryOp bop = BinaryOp::Add;
  Expr a;
  Expr b;
};

Expr::Expr() : node_(nullptr) {}

Expr Expr::number(double value) {
  if (!std::isfinite(value)) throw DomainError("non-finite numeric literal");
  if (std::signbit(value) && value != 0.0) return unary(UnaryOp::Neg, number(-value));
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->value = value == 0.0 ? 0.0 : value;
  return Expr(std::move(n));
}

Expr Expr::variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::unary(UnaryOp op, Expr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Unary;
  n->uop = op;
  n->a = std::move(arg);
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->bop = op;
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  return Expr(std::move(n));
}

// A default-constructed Expr has no node and behaves as Number(0).
Expr::Kind Expr::kind() const { return node_ ? node_->kind : Kind::Number; }
double Expr::value() const { return node_ ? node_->value : 0.0; }
const std::string& Expr::name() const { return node_->name; }
UnaryOp Expr::unary_op() const { return node_->uop; }
BinaryOp Expr::binary_op() const { return node_->bop; }
const Expr& Expr::arg() const { return node_->a; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }

namespace {

double apply_unary(UnaryOp op, double x) {
  switch (op) {
    case UnaryOp::Neg: return -x;
    case UnaryOp::Sin: return std::sin(x);
    case UnaryOp::Cos: return std::cos(x);
    case UnaryOp::Tan: return std::tan(x);
    case UnaryOp::Exp: return std::exp(x);
    case UnaryOp::Ln:
      if (!(x > 0.0)) throw DomainError("ln of non-positive value");
      return std::log(x);
    case UnaryOp::Sqrt:
      if (x < 0.0) throw DomainError("sqrt of negative value");
      return std::sqrt(x);
    case UnaryOp::Abs: return std::fabs(x);
  }
  return 0.0;
}

double apply_binary(BinaryOp op, double x, double y) {
  switch (op) {
    case BinaryOp::Add: return x + y;
    case BinaryOp::Sub: return x - y;
    case BinaryOp::Mul: return x * y;
    case BinaryOp::Div:
      if (y == 0.0) throw DomainError("division by zero");
      return x / y;
    case BinaryOp::Pow:
      if (x == 0.0 && y < 0.0) throw DomainError("zero raised to a negative power");
      if (x < 0.0 && y != std::trunc(y))
        throw DomainError("negative base raised to a non-integer power");
      return std::pow(x, y);
  }
  return 0.0;
}

}  // namespace

double Expr::eval(const Bindings& b) const {
  switch (kind()) {
    case Kind::Number: return value();
    case Kind::Variable: return b.get(node_->name);
    case Kind::Unary: return apply_unary(node_->uop, node_->a.eval(b));
    case Kind::Binary: {
      const double x = node_->a.eval(b);
      const double y = node_->b.eval(b);
      return apply_binary(node_->bop, x, y);
    }
  }
  return 0.0;
}

bool Expr::depends_on(std::string_view var) const {
  switch (kind()) {
    case Kind::Number: return false;
    case Kind::Variable: return node_->name == var;
    case Kind::Unary: return node_->a.depends_on(var);
    case Kind::Binary: return node_->a.depends_on(var) || node_->b.depends_on(var);
  }
  return false;
}

std::set<std::string> Expr::free_variables() const {
  std::set<std::string> out;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    switch (e.kind()) {
      case Kind::Number: break;
      case Kind::Variable: out.insert(e.name()); break;
      case Kind::Unary: walk(e.arg()); break;
      case Kind::Binary:
        walk(e.lhs());
        walk(e.rhs());
        break;
    }
  };
  walk(*this);
  return out;
}

Expr Expr::substitute(std::string_view var, const Expr& replacement) const {
  switch (kind()) {
    case Kind::Number: return *this;
    case Kind::Variable: return node_->name == var ? replacement : *this;
    case Kind::Unary: return unary(node_->uop, node_->a.substitute(var, replacement));
    case Kind::Binary:
      return binary(node_->bop, node_->a.substitute(var, replacement),
                    node_->b.substitute(var, replacement));
  }
  return *this;
}

bool Expr::structurally_equal(const Expr& other) const {
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Kind::Number: return value() == other.value();
    case Kind::Variable: return name() == other.name();
    case Kind::Unary:
      return unary_op() == other.unary_op() && arg().structurally_equal(other.arg());
    case Kind::Binary:
      return binary_op() == other.binary_op() && lhs().structurally_equal(other.lhs()) &&
             rhs().structurally_equal(other.rhs());
  }
  return false;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(UnaryOp::Neg, a); }
Expr pow(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Pow, a, b); }

// ---------------------------------------------------------------- registry

const std::vector<FunctionEntry>& function_registry() {
  static const std::vector<FunctionEntry> registry = {
      {"sin", UnaryOp::Sin},   {"cos", UnaryOp::Cos}, {"tan", UnaryOp::Tan},
      {"exp", UnaryOp::Exp},   {"ln", UnaryOp::Ln},   {"sqrt", UnaryOp::Sqrt},
      {"abs", UnaryOp::Abs},
  };
  return registry;
}

std::optional<UnaryOp> lookup_function(std::string_view name) {
  for (const auto& entry : function_registry()) {
    if (entry.name == name) return entry.op;
  }
  return std::nullopt;
}

std::string_view function_name(UnaryOp op) {
  for (const auto& entry : function_registry()) {
    if (entry.op == op) return entry.name;
  }
  return "-";
}

// ---------------------------------------------------------------- parser

namespace {

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    skip_ws();
    if (pos_ >= text_.size()) fail("an expression", "empty input");
    Expr e = parse_expr();
    skip_ws();
    if (pos_ < text_.size()) fail("an operator or end of input", "unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& expected, const std::string& message) const {
    throw ParseError(pos_, expected, message);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(BinaryOp::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = Expr::binary(BinaryOp::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(BinaryOp::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = Expr::binary(BinaryOp::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return Expr::unary(UnaryOp::Neg, parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) return Expr::binary(BinaryOp::Pow, base, parse_unary());
    return base;
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("a number, identifier or '('", "unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      if (!accept(')')) fail("')'", "unbalanced parenthesis");
      return inner;
    }
    if (is_digit(c) || c == '.') return parse_number();
    if (is_ident_start(c)) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
      std::string ident(text_.substr(start, pos_ - start));
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '(') {
        auto op = lookup_function(ident);
        if (!op) throw UnknownFunctionError(start, ident);
        ++pos_;
        Expr arg = parse_expr();
        if (!accept(')')) fail("')'", "unterminated function call");
        return Expr::unary(*op, arg);
      }
      return Expr::variable(std::move(ident));
    }
    fail("a number, identifier or '('", std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    }
    if (pos_ == start + 1 && text_[start] == '.') {
      pos_ = start;
      fail("a digit", "malformed number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && is_digit(text_[pos_])) {
        while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
      } else {
        pos_ = save;
        fail("exponent digits", "malformed number");
      }
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail("a finite number", "malformed or out-of-range number");
    }
    return Expr::number(value);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------- printer

namespace {

int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Number:
    case Expr::Kind::Variable: return 5;
    case Expr::Kind::Unary: return e.unary_op() == UnaryOp::Neg ? 3 : 5;
    case Expr::Kind::Binary:
      switch (e.binary_op()) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 2;
        case BinaryOp::Pow: return 4;
      }
  }
  return 5;
}

void print_into(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  print_into(e, out);
  if (parens) out += ')';
}

void print_into(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Number: {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, e.value());
      out.append(buf, ptr);
      return;
    }
    case Expr::Kind::Variable: out += e.name(); return;
    case Expr::Kind::Unary:
      if (e.unary_op() == UnaryOp::Neg) {
        out += '-';
        print_wrapped(e.arg(), precedence(e.arg()) < 3, out);
      } else {
        out += function_name(e.unary_op());
        print_wrapped(e.arg(), true, out);
      }
      return;
    case Expr::Kind::Binary: {
      const int p = precedence(e);
      const char* sym = "+";
      switch (e.binary_op()) {
        case BinaryOp::Add: sym = " + "; break;
        case BinaryOp::Sub: sym = " - "; break;
        case BinaryOp::Mul: sym = "*"; break;
        case BinaryOp::Div: sym = "/"; break;
        case BinaryOp::Pow: sym = "^"; break;
      }
      if (e.binary_op() == BinaryOp::Pow) {
        print_wrapped(e.lhs(), precedence(e.lhs()) <= p, out);
        out += sym;
        print_wrapped(e.rhs(), precedence(e.rhs()) < 3, out);
      } else {
        print_wrapped(e.lhs(), precedence(e.lhs()) < p, out);
        out += sym;
        print_wrapped(e.rhs(), precedence(e.rhs()) <= p, out);
      }
      return;
    }
  }
}

}  // namespace

std::string print(const Expr& e) {
  std::string out;
  print_into(e, out);
  return out;
}

// ---------------------------------------------------------------- derivative

Expr differentiate(const Expr& e, std::string_view var) {
  if (!e.depends_on(var)) return Expr::number(0.0);
  switch (e.kind()) {
    case Expr::Kind::Number: return Expr::number(0.0);
    case Expr::Kind::Variable: return Expr::number(1.0);
    case Expr::Kind::Unary: {
      const Expr& a = e.arg();
      const Expr da = differentiate(a, var);
      switch (e.unary_op()) {
        case UnaryOp::Neg: return -da;
        case UnaryOp::Sin: return Expr::unary(UnaryOp::Cos, a) * da;
        case UnaryOp::Cos: return -(Expr::unary(UnaryOp::Sin, a) * da);
        case UnaryOp::Tan: return da / pow(Expr::unary(UnaryOp::Cos, a), Expr::number(2));
        case UnaryOp::Exp: return Expr::unary(UnaryOp::Exp, a) * da;
        case UnaryOp::Ln: return da / a;
        case UnaryOp::Sqrt: return da / (Expr::number(2) * Expr::unary(UnaryOp::Sqrt, a));
        // a/|a| is the sign; evaluates to a domain error at a = 0.
        case UnaryOp::Abs: return da * (a / Expr::unary(UnaryOp::Abs, a));
      }
      break;
    }
    case Expr::Kind::Binary: {
      const Expr& a = e.lhs();
      const Expr& b = e.rhs();
      const bool da_live = a.depends_on(var);
      const bool db_live = b.depends_on(var);
      switch (e.binary_op()) {
        case BinaryOp::Add:
          if (!da_live) return differentiate(b, var);
          if (!db_live) return differentiate(a, var);
          return differentiate(a, var) + differentiate(b, var);
        case BinaryOp::Sub:
          if (!da_live) return -differentiate(b, var);
          if (!db_live) return differentiate(a, var);
          return differentiate(a, var) - differentiate(b, var);
        case BinaryOp::Mul:
          if (!da_live) return a * differentiate(b, var);
          if (!db_live) return differentiate(a, var) * b;
          return differentiate(a, var) * b + a * differentiate(b, var);
        case BinaryOp::Div:
          if (!db_live) return differentiate(a, var) / b;
          return (differentiate(a, var) * b - a * differentiate(b, var)) /
                 pow(b, Expr::number(2));
        case BinaryOp::Pow:
          if (!db_live) {
            return b * pow(a, b - Expr::number(1)) * differentiate(a, var);
          }
          if (!da_live) {
            return e * Expr::unary(UnaryOp::Ln, a) * differentiate(b, var);
          }
          return e * (differentiate(b, var) * Expr::unary(UnaryOp::Ln, a) +
                      b * differentiate(a, var) / a);
      }
      break;
    }
  }
  return Expr::number(0.0);
}

}  // namespace ermakov
