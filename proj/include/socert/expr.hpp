#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "socert/linalg.hpp"

namespace socert {

enum class NodeKind { Constant, Variable, Neg, Sin, Cos, Exp, Ln, Sqrt, Add, Sub, Mul, Div, Pow };

struct Node {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;  // literal for Constant, exponent for Pow
  int var = -1;
  int lhs = -1;
  int rhs = -1;
};

// Value, gradient and Hessian of a scalar function at a point. The Hessian
// is stored as its lower triangle, so it is symmetric by construction.
class Taylor2 {
 public:
  Taylor2() = default;
  explicit Taylor2(std::size_t n, double value = 0.0)
      : value_(value), grad_(n, 0.0), hess_(n * (n + 1) / 2, 0.0) {}

  std::size_t arity() const { return grad_.size(); }
  double value() const { return value_; }
  const Vector& gradient() const { return grad_; }
  double hess(std::size_t i, std::size_t j) const { return i >= j ? hess_[tri(i, j)] : hess_[tri(j, i)]; }
  Matrix hessian() const;

  double& value_ref() { return value_; }
  Vector& grad_ref() { return grad_; }
  Vector& hess_lower() { return hess_; }
  const Vector& hess_lower() const { return hess_; }

  static std::size_t tri(std::size_t i, std::size_t j) { return i * (i + 1) / 2 + j; }

 private:
  double value_ = 0.0;
  Vector grad_;
  Vector hess_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, std::string subexpression)
      : std::runtime_error(what + " in " + subexpression), subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

// An immutable expression over named variables x_0..x_{n-1}.
class ScalarFunction {
 public:
  ScalarFunction() = default;
  ScalarFunction(std::vector<std::string> vars, std::vector<Node> nodes, int root);

  static ScalarFunction constant(std::vector<std::string> vars, double c);

  std::size_t arity() const { return vars_.size(); }
  const std::vector<std::string>& variables() const { return vars_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }

  double eval(std::span<const double> x) const;
  Taylor2 eval_jet(std::span<const double> x) const;

  // Fully parenthesized source that parses back to an equivalent AST.
  std::string print() const;
  std::string print_node(int id) const;
  std::size_t interior_node_count() const;

 private:
  double eval_node(int id, std::span<const double> x) const;
  Taylor2 jet_node(int id, std::span<const double> x) const;

  std::vector<std::string> vars_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

ScalarFunction parse(std::string_view source, std::span<const std::string> vars);

// Max over gradient and Hessian entries of |analytic - central difference| /
// (1 + |analytic|). The differences use function values only.
double fd_check(const ScalarFunction& f, std::span<const double> x, double h);

}  // namespace socert
