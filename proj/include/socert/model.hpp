#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "socert/expr.hpp"
#include "socert/linalg.hpp"

namespace socert {

// Bad input data: malformed problem files, arity mismatches, infeasible
// candidate points.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NamedFunction {
  std::string name;
  ScalarFunction fn;
};

// User-supplied factorization J(x) = U(x) Σ(x) V(x)ᵀ of the active
// Jacobian. Rows of U follow the row order of J. Entries not listed are 0.
struct SvdOracle {
  std::map<std::pair<std::size_t, std::size_t>, ScalarFunction> u;  // 0-based (row, col)
  std::map<std::size_t, ScalarFunction> sigma;                       // 0-based k
  std::map<std::pair<std::size_t, std::size_t>, ScalarFunction> v;

  struct Factors {
    Matrix u;      // rows x rows
    Vector sigma;  // min(rows, n)
    Matrix v;      // n x n
  };
  // rows = m + |A(x*)|. Throws DataError if an index exceeds the shape.
  Factors evaluate(std::span<const double> x, std::size_t rows, std::size_t n) const;
};

struct NlpProblem {
  std::string name;
  std::vector<std::string> vars;
  ScalarFunction objective;
  std::vector<NamedFunction> equalities;    // h_i(x) = 0
  std::vector<NamedFunction> inequalities;  // g_j(x) <= 0
  Vector point;
  std::optional<SvdOracle> oracle;

  std::size_t arity() const { return vars.size(); }
};

NlpProblem parse_problem(const std::string& text);
NlpProblem load_problem(const std::filesystem::path& file);

struct StationaryPointAnalysis {
  Vector x;
  double feasibility_residual = 0.0;
  std::size_t num_equalities = 0;
  std::vector<std::size_t> active;  // 0-based inequality indices, ascending
  Matrix jacobian;                  // (m + |A|) x n, equality rows first
  std::size_t rank = 0;
  Matrix critical_basis;            // n x s, orthonormal basis of Ker(J)
  Tolerances rank_tol;

  Vector grad_f;
  Matrix hess_f;
  std::vector<Matrix> row_hessians;  // one per Jacobian row

  std::size_t rows() const { return num_equalities + active.size(); }
  std::size_t dim() const { return x.size(); }
  std::size_t subspace_dim() const { return critical_basis.cols(); }
};

constexpr double kFeasibilityTol = 1e-8;

StationaryPointAnalysis analyze_point(const NlpProblem& p, double eps_act = 1e-8, Tolerances rank_tol = {});

// Jacobian at x with the same rows as a.jacobian.
Matrix active_jacobian(const NlpProblem& p, const StationaryPointAnalysis& a, std::span<const double> x);

// ∇²f + Σ λ_i ∇²h_i + Σ_{j∈A} μ_j ∇²g_j at x*.
Matrix lagrangian_hessian(const NlpProblem& p, const StationaryPointAnalysis& a, std::span<const double> lambda,
                          std::span<const double> mu_active);
// Same, with nu = (λ, μ_A) stacked in Jacobian row order.
Matrix lagrangian_hessian(const StationaryPointAnalysis& a, std::span<const double> nu);

// Constraint label for Jacobian row k ("h:name" style is avoided; plain names).
std::string row_name(const NlpProblem& p, const StationaryPointAnalysis& a, std::size_t row);

}  // namespace socert
