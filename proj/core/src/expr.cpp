#include "hybridbvp/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "hybridbvp/errors.hpp"

namespace hybridbvp {

std::string_view var_name(Var var) noexcept {
  switch (var) {
    case Var::t: return "t";
    case Var::u: return "u";
    case Var::v: return "v";
    case Var::y: return "y";
    case Var::r: return "r";
  }
  return "?";
}

Env::Env(std::initializer_list<std::pair<Var, double>> bindings) {
  for (const auto& [var, value] : bindings) set(var, value);
}

namespace {

struct FuncInfo {
  std::string_view name;
  Func func;
  int arity;
};

constexpr std::array<FuncInfo, 8> kFuncs{{
    {"abs", Func::abs, 1},
    {"sin", Func::sin, 1},
    {"cos", Func::cos, 1},
    {"sqrt", Func::sqrt, 1},
    {"sign", Func::sign, 1},
    {"min", Func::min, 2},
    {"max", Func::max, 2},
    {"powabs", Func::powabs, 2},
}};

std::string_view func_name(Func f) {
  for (const auto& info : kFuncs) {
    if (info.func == f) return info.name;
  }
  return "?";
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Guards the recursive descent itself; the tree depth limit is checked after.
constexpr std::size_t kMaxRecursion = 4 * kMaxExprDepth;

}  // namespace

class Parser {
 public:
  Parser(std::string_view src, std::initializer_list<Var> allowed) : src_(src) {
    for (Var v : allowed) allowed_ |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(v));
  }

  Expr run() {
    const auto root = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    auto nodes = std::make_shared<const std::vector<Expr::Node>>(std::move(nodes_));
    Expr e(std::move(nodes), root, std::string(src_));
    if (e.depth() > kMaxExprDepth) {
      throw ParseError("expression nests deeper than " + std::to_string(kMaxExprDepth), 0);
    }
    return e;
  }

 private:
  using Idx = std::int32_t;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const {
    throw ParseError(what, at);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Idx push(Expr::Node node) {
    nodes_.push_back(node);
    return static_cast<Idx>(nodes_.size() - 1);
  }

  Idx binary(Expr::Kind kind, Idx lhs, Idx rhs) {
    Expr::Node n{kind};
    n.lhs = lhs;
    n.rhs = rhs;
    return push(n);
  }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.recursion_ > kMaxRecursion) {
        p.fail("expression nests deeper than " + std::to_string(kMaxExprDepth));
      }
    }
    ~DepthGuard() { --p.recursion_; }
  };

  Idx parse_expr() {
    DepthGuard guard(*this);
    Idx lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Expr::Kind::add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = binary(Expr::Kind::sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  Idx parse_term() {
    Idx lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Expr::Kind::mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = binary(Expr::Kind::div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Idx parse_unary() {
    DepthGuard guard(*this);
    if (accept('-')) {
      Expr::Node n{Expr::Kind::neg};
      n.lhs = parse_unary();
      return push(n);
    }
    return parse_power();
  }

  Idx parse_power() {
    const Idx base = parse_atom();
    if (!accept('^')) return base;
    const std::size_t exponent_start = pos_;
    const std::size_t first_node = nodes_.size();
    const Idx exponent = parse_unary();
    for (std::size_t i = first_node; i < nodes_.size(); ++i) {
      if (nodes_[i].kind == Expr::Kind::variable) {
        fail_at("exponent of '^' must be constant (use powabs for variable exponents)",
                exponent_start);
      }
    }
    return binary(Expr::Kind::pow, base, exponent);
  }

  Idx parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      const Idx inner = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Idx parse_number() {
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    Expr::Node n{Expr::Kind::number};
    n.value = value;
    return push(n);
  }

  Idx parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = src_.substr(start, pos_ - start);

    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      const auto info = std::find_if(kFuncs.begin(), kFuncs.end(),
                                     [&](const FuncInfo& f) { return f.name == name; });
      if (info == kFuncs.end()) fail_at("unknown function '" + std::string(name) + "'", start);
      ++pos_;
      std::vector<Idx> args{parse_expr()};
      while (accept(',')) args.push_back(parse_expr());
      if (!accept(')')) fail("expected ')' or ','");
      if (static_cast<int>(args.size()) != info->arity) {
        fail_at(std::string(name) + " takes " + std::to_string(info->arity) + " argument(s), got " +
                    std::to_string(args.size()),
                start);
      }
      Expr::Node n{Expr::Kind::call};
      n.func = info->func;
      n.lhs = args[0];
      if (args.size() > 1) n.rhs = args[1];
      return push(n);
    }

    if (name == "pi") {
      Expr::Node n{Expr::Kind::number};
      n.value = std::numbers::pi;
      return push(n);
    }
    for (std::size_t i = 0; i < kVarCount; ++i) {
      const auto var = static_cast<Var>(i);
      if (name != var_name(var)) continue;
      if (!((allowed_ >> i) & 1u)) {
        std::string list;
        for (std::size_t j = 0; j < kVarCount; ++j) {
          if ((allowed_ >> j) & 1u) {
            if (!list.empty()) list += ", ";
            list += var_name(static_cast<Var>(j));
          }
        }
        fail_at("variable '" + std::string(name) + "' is not available here (allowed: " +
                    (list.empty() ? "none" : list) + ")",
                start);
      }
      Expr::Node n{Expr::Kind::variable};
      n.var = var;
      return push(n);
    }
    fail_at("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t recursion_ = 0;
  std::uint8_t allowed_ = 0;
  std::vector<Expr::Node> nodes_;
};

Expr::Expr(double value) : source_(format_number(value)) {
  Node n{Kind::number};
  n.value = value;
  nodes_ = std::make_shared<const std::vector<Node>>(std::vector<Node>{n});
}

Expr::Expr(std::shared_ptr<const std::vector<Node>> nodes, std::int32_t root, std::string source)
    : nodes_(std::move(nodes)), root_(root), source_(std::move(source)) {
  for (const auto& n : *nodes_) {
    if (n.kind == Kind::variable) variables_ |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(n.var));
  }
}

std::size_t Expr::depth() const {
  const auto& nodes = *nodes_;
  // Children always precede their parent in storage.
  std::vector<std::size_t> d(nodes.size(), 1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::size_t child = 0;
    if (nodes[i].lhs >= 0) child = std::max(child, d[static_cast<std::size_t>(nodes[i].lhs)]);
    if (nodes[i].rhs >= 0) child = std::max(child, d[static_cast<std::size_t>(nodes[i].rhs)]);
    d[i] = child + 1;
  }
  return d[static_cast<std::size_t>(root_)];
}

double Expr::operator()(const Env& env) const { return eval_node(root_, env); }

double Expr::eval_node(std::int32_t idx, const Env& env) const {
  const Node& n = (*nodes_)[static_cast<std::size_t>(idx)];
  auto domain = [&](const std::string& why) -> DomainError {
    std::string text;
    render(idx, text);
    return DomainError(why + " in '" + text + "'");
  };
  switch (n.kind) {
    case Kind::number:
      return n.value;
    case Kind::variable:
      if (!env.has(n.var)) {
        throw InvalidArgument("no value bound for variable '" + std::string(var_name(n.var)) + "'");
      }
      return env.get(n.var);
    case Kind::neg:
      return -eval_node(n.lhs, env);
    case Kind::add:
      return eval_node(n.lhs, env) + eval_node(n.rhs, env);
    case Kind::sub:
      return eval_node(n.lhs, env) - eval_node(n.rhs, env);
    case Kind::mul:
      return eval_node(n.lhs, env) * eval_node(n.rhs, env);
    case Kind::div: {
      const double num = eval_node(n.lhs, env);
      const double den = eval_node(n.rhs, env);
      if (den == 0.0) throw domain("division by zero");
      return num / den;
    }
    case Kind::pow: {
      const double base = eval_node(n.lhs, env);
      const double exponent = eval_node(n.rhs, env);
      if (base < 0.0 && exponent != std::trunc(exponent)) {
        throw domain("negative base with non-integer exponent (use powabs)");
      }
      if (base == 0.0 && exponent < 0.0) throw domain("zero to a negative power");
      return std::pow(base, exponent);
    }
    case Kind::call: {
      const double a = eval_node(n.lhs, env);
      switch (n.func) {
        case Func::abs: return std::abs(a);
        case Func::sin: return std::sin(a);
        case Func::cos: return std::cos(a);
        case Func::sqrt:
          if (a < 0.0) throw domain("sqrt of a negative number");
          return std::sqrt(a);
        case Func::sign: return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
        case Func::min: return std::min(a, eval_node(n.rhs, env));
        case Func::max: return std::max(a, eval_node(n.rhs, env));
        case Func::powabs: {
          const double e = eval_node(n.rhs, env);
          if (a == 0.0) {
            if (e <= 0.0) throw domain("powabs(0, e) with e <= 0");
            return 0.0;
          }
          return std::copysign(std::pow(std::abs(a), e), a);
        }
      }
    }
  }
  return 0.0;
}

void Expr::render(std::int32_t idx, std::string& out) const {
  const Node& n = (*nodes_)[static_cast<std::size_t>(idx)];
  auto infix = [&](const char* op) {
    out += '(';
    render(n.lhs, out);
    out += op;
    render(n.rhs, out);
    out += ')';
  };
  switch (n.kind) {
    case Kind::number: out += format_number(n.value); break;
    case Kind::variable: out += var_name(n.var); break;
    case Kind::neg:
      out += "(-";
      render(n.lhs, out);
      out += ')';
      break;
    case Kind::add: infix(" + "); break;
    case Kind::sub: infix(" - "); break;
    case Kind::mul: infix(" * "); break;
    case Kind::div: infix(" / "); break;
    case Kind::pow: infix(" ^ "); break;
    case Kind::call:
      out += func_name(n.func);
      out += '(';
      render(n.lhs, out);
      if (n.rhs >= 0) {
        out += ", ";
        render(n.rhs, out);
      }
      out += ')';
      break;
  }
}

std::string Expr::to_string() const {
  std::string out;
  render(root_, out);
  return out;
}

namespace {

bool same_tree(const std::vector<Expr::Node>& a, std::int32_t ia, const std::vector<Expr::Node>& b,
               std::int32_t ib) {
  if ((ia < 0) != (ib < 0)) return false;
  if (ia < 0) return true;
  const auto& x = a[static_cast<std::size_t>(ia)];
  const auto& y = b[static_cast<std::size_t>(ib)];
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Expr::Kind::number:
      if (x.value != y.value) return false;
      break;
    case Expr::Kind::variable:
      if (x.var != y.var) return false;
      break;
    case Expr::Kind::call:
      if (x.func != y.func) return false;
      break;
    default:
      break;
  }
  return same_tree(a, x.lhs, b, y.lhs) && same_tree(a, x.rhs, b, y.rhs);
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
  return same_tree(*a.nodes_, a.root_, *b.nodes_, b.root_);
}

Expr parse(std::string_view source, std::initializer_list<Var> allowed) {
  return Parser(source, allowed).run();
}

double eval(const Expr& e, const Env& env) { return e(env); }

}  // namespace hybridbvp
