#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hybridbvp {

/// Variables an expression may refer to. Which ones are legal depends on the
/// slot the expression fills (h0 may only see v, phi sees t, y, r, ...).
enum class Var : std::uint8_t { t, u, v, y, r };
inline constexpr std::size_t kVarCount = 5;

std::string_view var_name(Var var) noexcept;

/// Variable bindings for evaluation.
class Env {
 public:
  Env() = default;
  Env(std::initializer_list<std::pair<Var, double>> bindings);

  Env& set(Var var, double value) noexcept {
    values_[static_cast<std::size_t>(var)] = value;
    mask_ |= bit(var);
    return *this;
  }
  bool has(Var var) const noexcept { return (mask_ & bit(var)) != 0; }
  double get(Var var) const noexcept { return values_[static_cast<std::size_t>(var)]; }

 private:
  static constexpr std::uint8_t bit(Var var) noexcept {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(var));
  }
  std::array<double, kVarCount> values_{};
  std::uint8_t mask_ = 0;
};

enum class Func : std::uint8_t { abs, sin, cos, sqrt, sign, min, max, powabs };

/// Immutable arithmetic expression tree. Copies share the node storage.
///
/// Grammar (whitespace-insensitive):
///   expr  := term (('+'|'-') term)*
///   term  := unary (('*'|'/') unary)*
///   unary := '-' unary | power
///   power := atom ('^' unary)?          right-associative, exponent constant
///   atom  := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
/// so ^ binds tighter than unary minus: -v^2 is -(v^2).
class Expr {
 public:
  enum class Kind : std::uint8_t { number, variable, neg, add, sub, mul, div, pow, call };

  struct Node {
    Kind kind;
    double value = 0.0;
    Var var = Var::t;
    Func func = Func::abs;
    std::int32_t lhs = -1;
    std::int32_t rhs = -1;
  };

  /// Constant expression.
  explicit Expr(double value = 0.0);

  double operator()(const Env& env) const;

  /// Fully parenthesized rendering that parses back to the same tree.
  std::string to_string() const;
  const std::string& source() const noexcept { return source_; }
  /// Bit set of variables referenced (bit i for Var i).
  std::uint8_t variables() const noexcept { return variables_; }
  bool uses(Var var) const noexcept { return (variables_ >> static_cast<unsigned>(var)) & 1u; }
  bool is_constant() const noexcept { return variables_ == 0; }
  std::size_t depth() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  friend class Parser;
  Expr(std::shared_ptr<const std::vector<Node>> nodes, std::int32_t root, std::string source);

  double eval_node(std::int32_t idx, const Env& env) const;
  void render(std::int32_t idx, std::string& out) const;

  std::shared_ptr<const std::vector<Node>> nodes_;
  std::int32_t root_ = 0;
  std::string source_;
  std::uint8_t variables_ = 0;
};

inline constexpr std::size_t kMaxExprDepth = 64;

/// Parses `source`, accepting only the listed variables. Throws ParseError
/// with a byte offset on malformed input, unknown identifiers, wrong arity,
/// a non-constant exponent or nesting deeper than kMaxExprDepth.
Expr parse(std::string_view source,
           std::initializer_list<Var> allowed = {Var::t, Var::u, Var::v, Var::y, Var::r});

/// Throws InvalidArgument when a variable is unbound and DomainError (naming
/// the offending subexpression) for sqrt of a negative, division by zero or a
/// negative base under a non-integer exponent.
double eval(const Expr& e, const Env& env);

}  // namespace hybridbvp
