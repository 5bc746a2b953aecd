#include "socert/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace socert {

Matrix Taylor2::hessian() const {
  const std::size_t n = arity();
  Matrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      h(i, j) = hess_[tri(i, j)];
      h(j, i) = hess_[tri(i, j)];
    }
  return h;
}

namespace {

// ---------------------------------------------------------------------------
// Jet arithmetic

Taylor2 jet_add(const Taylor2& a, const Taylor2& b, double sign) {
  Taylor2 r = a;
  r.value_ref() = a.value() + sign * b.value();
  for (std::size_t i = 0; i < r.grad_ref().size(); ++i) r.grad_ref()[i] += sign * b.gradient()[i];
  for (std::size_t i = 0; i < r.hess_lower().size(); ++i) r.hess_lower()[i] += sign * b.hess_lower()[i];
  return r;
}

Taylor2 jet_mul(const Taylor2& a, const Taylor2& b) {
  const std::size_t n = a.arity();
  Taylor2 r(n, a.value() * b.value());
  const Vector& ga = a.gradient();
  const Vector& gb = b.gradient();
  for (std::size_t i = 0; i < n; ++i) r.grad_ref()[i] = a.value() * gb[i] + b.value() * ga[i];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const std::size_t k = Taylor2::tri(i, j);
      r.hess_lower()[k] = a.value() * b.hess_lower()[k] + b.value() * a.hess_lower()[k] + ga[i] * gb[j] + gb[i] * ga[j];
    }
  return r;
}

// Chain rule for a scalar function phi with phi(a)=f0, phi'(a)=f1, phi''(a)=f2.
Taylor2 jet_unary(const Taylor2& a, double f0, double f1, double f2) {
  const std::size_t n = a.arity();
  Taylor2 r(n, f0);
  const Vector& ga = a.gradient();
  for (std::size_t i = 0; i < n; ++i) r.grad_ref()[i] = f1 * ga[i];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const std::size_t k = Taylor2::tri(i, j);
      r.hess_lower()[k] = f1 * a.hess_lower()[k] + f2 * ga[i] * ga[j];
    }
  return r;
}

Taylor2 jet_neg(const Taylor2& a) { return jet_unary(a, -a.value(), -1.0, 0.0); }

bool is_small_integer(double e) { return e == std::floor(e) && std::abs(e) <= 64.0; }

template <typename T, typename Mul, typename One>
T int_power(const T& base, int k, Mul mul, One one) {
  if (k == 0) return one();
  T r = base;
  for (int i = 1; i < k; ++i) r = mul(r, base);
  return r;
}

// ---------------------------------------------------------------------------
// Parser

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string text;
  double number = 0.0;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
          i = j;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
      }
      std::string text(s.substr(start, i - start));
      if (text == ".") throw ParseError("malformed number", start);
      out.push_back({Tok::Number, start, text, std::strtod(text.c_str(), nullptr)});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::Ident, start, std::string(s.substr(start, i - start))});
      continue;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '^': k = Tok::Caret; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      default: throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
    out.push_back({k, start, std::string(1, c)});
    ++i;
  }
  out.push_back({Tok::End, s.size(), "end of input"});
  return out;
}

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> vars) : toks_(tokenize(src)), vars_(vars) {}

  ScalarFunction run() {
    const int root = expr();
    if (peek().kind != Tok::End) unexpected();
    return ScalarFunction(std::vector<std::string>(vars_.begin(), vars_.end()), std::move(nodes_), root);
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }
  [[noreturn]] void unexpected() const {
    const Token& t = peek();
    throw ParseError("unexpected token '" + t.text + "'", t.offset);
  }

  int add(Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int expr() {
    int lhs = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const NodeKind k = take().kind == Tok::Plus ? NodeKind::Add : NodeKind::Sub;
      const int rhs = term();
      lhs = add({k, 0.0, -1, lhs, rhs});
    }
    return lhs;
  }

  int term() {
    int lhs = factor();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const NodeKind k = take().kind == Tok::Star ? NodeKind::Mul : NodeKind::Div;
      const int rhs = factor();
      lhs = add({k, 0.0, -1, lhs, rhs});
    }
    return lhs;
  }

  int factor() {
    if (peek().kind == Tok::Minus) {
      take();
      const int inner = factor();
      return add({NodeKind::Neg, 0.0, -1, inner, -1});
    }
    const int base = atom();
    if (peek().kind == Tok::Caret) {
      take();
      const double e = exponent();
      return add({NodeKind::Pow, e, -1, base, -1});
    }
    return base;
  }

  // number ("^" number)* folded right-associatively; a leading '-' is
  // accepted so printed negative exponents parse back.
  double exponent() {
    bool negative = false;
    if (peek().kind == Tok::Minus) {
      take();
      negative = true;
    }
    if (peek().kind != Tok::Number) {
      if (peek().kind == Tok::End) unexpected();
      throw ParseError("non-constant exponent", peek().offset);
    }
    double e = take().number;
    if (peek().kind == Tok::Caret) {
      take();
      e = std::pow(e, exponent());
    }
    return negative ? -e : e;
  }

  int atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        take();
        return add({NodeKind::Constant, t.number, -1, -1, -1});
      case Tok::LParen: {
        take();
        const int inner = expr();
        if (peek().kind != Tok::RParen) unexpected();
        take();
        return inner;
      }
      case Tok::Ident:
        return ident();
      default:
        unexpected();
    }
  }

  int ident() {
    const Token t = take();
    static constexpr std::pair<const char*, NodeKind> kFunctions[] = {
        {"sin", NodeKind::Sin}, {"cos", NodeKind::Cos}, {"exp", NodeKind::Exp}, {"ln", NodeKind::Ln},
        {"sqrt", NodeKind::Sqrt}};
    if (peek().kind == Tok::LParen) {
      for (const auto& [name, kind] : kFunctions) {
        if (t.text == name) {
          take();
          const int inner = expr();
          if (peek().kind != Tok::RParen) unexpected();
          take();
          return add({kind, 0.0, -1, inner, -1});
        }
      }
      throw ParseError("unknown function '" + t.text + "'", t.offset);
    }
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == t.text) return add({NodeKind::Variable, 0.0, static_cast<int>(i), -1, -1});
    if (t.text == "pi") return add({NodeKind::Constant, std::numbers::pi, -1, -1, -1});
    throw ParseError("unknown identifier '" + t.text + "'", t.offset);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::span<const std::string> vars_;
  std::vector<Node> nodes_;
};

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ScalarFunction::ScalarFunction(std::vector<std::string> vars, std::vector<Node> nodes, int root)
    : vars_(std::move(vars)), nodes_(std::move(nodes)), root_(root) {
  for (const Node& n : nodes_)
    if (n.kind == NodeKind::Variable && (n.var < 0 || static_cast<std::size_t>(n.var) >= vars_.size()))
      throw std::invalid_argument("variable index out of range");
}

ScalarFunction ScalarFunction::constant(std::vector<std::string> vars, double c) {
  return ScalarFunction(std::move(vars), {Node{NodeKind::Constant, c, -1, -1, -1}}, 0);
}

double ScalarFunction::eval(std::span<const double> x) const {
  if (x.size() != arity()) throw std::invalid_argument("point arity mismatch");
  return eval_node(root_, x);
}

Taylor2 ScalarFunction::eval_jet(std::span<const double> x) const {
  if (x.size() != arity()) throw std::invalid_argument("point arity mismatch");
  return jet_node(root_, x);
}

double ScalarFunction::eval_node(int id, std::span<const double> x) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  switch (n.kind) {
    case NodeKind::Constant: return n.value;
    case NodeKind::Variable: return x[static_cast<std::size_t>(n.var)];
    case NodeKind::Neg: return -eval_node(n.lhs, x);
    case NodeKind::Sin: return std::sin(eval_node(n.lhs, x));
    case NodeKind::Cos: return std::cos(eval_node(n.lhs, x));
    case NodeKind::Exp: return std::exp(eval_node(n.lhs, x));
    case NodeKind::Ln: {
      const double a = eval_node(n.lhs, x);
      if (!(a > 0.0)) throw DomainError("logarithm of nonpositive value", print_node(id));
      return std::log(a);
    }
    case NodeKind::Sqrt: {
      const double a = eval_node(n.lhs, x);
      if (!(a > 0.0)) throw DomainError("square root of nonpositive value", print_node(id));
      return std::sqrt(a);
    }
    case NodeKind::Add: return eval_node(n.lhs, x) + eval_node(n.rhs, x);
    case NodeKind::Sub: return eval_node(n.lhs, x) - eval_node(n.rhs, x);
    case NodeKind::Mul: return eval_node(n.lhs, x) * eval_node(n.rhs, x);
    case NodeKind::Div: {
      const double a = eval_node(n.lhs, x);
      const double b = eval_node(n.rhs, x);
      if (b == 0.0) throw DomainError("division by zero", print_node(id));
      return a * (1.0 / b);
    }
    case NodeKind::Pow: {
      const double a = eval_node(n.lhs, x);
      if (is_small_integer(n.value)) {
        const int k = static_cast<int>(std::abs(n.value));
        const double p = int_power(a, k, [](double u, double v) { return u * v; }, [] { return 1.0; });
        if (n.value >= 0) return p;
        if (p == 0.0) throw DomainError("division by zero", print_node(id));
        return 1.0 / p;
      }
      if (!(a > 0.0)) throw DomainError("real power of nonpositive value", print_node(id));
      return std::exp(n.value * std::log(a));
    }
  }
  return 0.0;
}

Taylor2 ScalarFunction::jet_node(int id, std::span<const double> x) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  const std::size_t dim = arity();
  switch (n.kind) {
    case NodeKind::Constant: return Taylor2(dim, n.value);
    case NodeKind::Variable: {
      Taylor2 t(dim, x[static_cast<std::size_t>(n.var)]);
      t.grad_ref()[static_cast<std::size_t>(n.var)] = 1.0;
      return t;
    }
    case NodeKind::Neg: return jet_neg(jet_node(n.lhs, x));
    case NodeKind::Sin: {
      const Taylor2 a = jet_node(n.lhs, x);
      const double s = std::sin(a.value()), c = std::cos(a.value());
      return jet_unary(a, s, c, -s);
    }
    case NodeKind::Cos: {
      const Taylor2 a = jet_node(n.lhs, x);
      const double s = std::sin(a.value()), c = std::cos(a.value());
      return jet_unary(a, c, -s, -c);
    }
    case NodeKind::Exp: {
      const Taylor2 a = jet_node(n.lhs, x);
      const double e = std::exp(a.value());
      return jet_unary(a, e, e, e);
    }
    case NodeKind::Ln: {
      const Taylor2 a = jet_node(n.lhs, x);
      if (!(a.value() > 0.0)) throw DomainError("logarithm of nonpositive value", print_node(id));
      const double inv = 1.0 / a.value();
      return jet_unary(a, std::log(a.value()), inv, -inv * inv);
    }
    case NodeKind::Sqrt: {
      const Taylor2 a = jet_node(n.lhs, x);
      if (!(a.value() > 0.0)) throw DomainError("square root of nonpositive value", print_node(id));
      const double r = std::sqrt(a.value());
      return jet_unary(a, r, 0.5 / r, -0.25 / (r * a.value()));
    }
    case NodeKind::Add: return jet_add(jet_node(n.lhs, x), jet_node(n.rhs, x), 1.0);
    case NodeKind::Sub: return jet_add(jet_node(n.lhs, x), jet_node(n.rhs, x), -1.0);
    case NodeKind::Mul: return jet_mul(jet_node(n.lhs, x), jet_node(n.rhs, x));
    case NodeKind::Div: {
      const Taylor2 a = jet_node(n.lhs, x);
      const Taylor2 b = jet_node(n.rhs, x);
      if (b.value() == 0.0) throw DomainError("division by zero", print_node(id));
      const double inv = 1.0 / b.value();
      return jet_mul(a, jet_unary(b, inv, -inv * inv, 2.0 * inv * inv * inv));
    }
    case NodeKind::Pow: {
      const Taylor2 a = jet_node(n.lhs, x);
      if (is_small_integer(n.value)) {
        const int k = static_cast<int>(std::abs(n.value));
        Taylor2 p = int_power(a, k, jet_mul, [dim] { return Taylor2(dim, 1.0); });
        if (n.value >= 0) return p;
        if (p.value() == 0.0) throw DomainError("division by zero", print_node(id));
        const double inv = 1.0 / p.value();
        return jet_unary(p, inv, -inv * inv, 2.0 * inv * inv * inv);
      }
      if (!(a.value() > 0.0)) throw DomainError("real power of nonpositive value", print_node(id));
      const double c = n.value;
      const double v = std::exp(c * std::log(a.value()));
      return jet_unary(a, v, c * v / a.value(), c * (c - 1.0) * v / (a.value() * a.value()));
    }
  }
  return Taylor2(dim);
}

std::string ScalarFunction::print() const { return print_node(root_); }

std::string ScalarFunction::print_node(int id) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  auto unary = [&](const char* name) { return std::string(name) + "(" + print_node(n.lhs) + ")"; };
  auto binary = [&](const char* op) { return "(" + print_node(n.lhs) + " " + op + " " + print_node(n.rhs) + ")"; };
  switch (n.kind) {
    case NodeKind::Constant: return format_number(n.value);
    case NodeKind::Variable: return vars_[static_cast<std::size_t>(n.var)];
    case NodeKind::Neg: return "(-" + print_node(n.lhs) + ")";
    case NodeKind::Sin: return unary("sin");
    case NodeKind::Cos: return unary("cos");
    case NodeKind::Exp: return unary("exp");
    case NodeKind::Ln: return unary("ln");
    case NodeKind::Sqrt: return unary("sqrt");
    case NodeKind::Add: return binary("+");
    case NodeKind::Sub: return binary("-");
    case NodeKind::Mul: return binary("*");
    case NodeKind::Div: return binary("/");
    case NodeKind::Pow: return "(" + print_node(n.lhs) + ")^" + format_number(n.value);
  }
  return {};
}

std::size_t ScalarFunction::interior_node_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) {
    return n.kind != NodeKind::Constant && n.kind != NodeKind::Variable;
  }));
}

ScalarFunction parse(std::string_view source, std::span<const std::string> vars) {
  return Parser(source, vars).run();
}

double fd_check(const ScalarFunction& f, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_check needs a positive step");
  const std::size_t n = f.arity();
  const Taylor2 jet = f.eval_jet(x);
  Vector p(x.begin(), x.end());
  auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
    Vector q = p;
    q[i] += di;
    q[j] += dj;
    return f.eval(q);
  };
  const double f0 = f.eval(p);
  double worst = 0.0;
  auto record = [&](double analytic, double numeric) {
    worst = std::max(worst, std::abs(analytic - numeric) / (1.0 + std::abs(analytic)));
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double fp = at(i, h, i, 0.0);
    const double fm = at(i, -h, i, 0.0);
    record(jet.gradient()[i], (fp - fm) / (2.0 * h));
    record(jet.hess(i, i), (fp - 2.0 * f0 + fm) / (h * h));
    for (std::size_t j = 0; j < i; ++j) {
      const double mixed = (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4.0 * h * h);
      record(jet.hess(i, j), mixed);
    }
  }
  return worst;
}

}  // namespace socert
