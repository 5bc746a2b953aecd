#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "socert/linalg.hpp"
#include "socert/model.hpp"
#include "socert/multipliers.hpp"

namespace socert {

constexpr double kDefaultPsdTol = 1e-8;

// The form d ↦ dᵀHd restricted to span(basis): form = BᵀHB.
struct RestrictedForm {
  Matrix basis;  // n x s, orthonormal
  Matrix form;   // s x s, symmetric
  Vector multiplier;
};

RestrictedForm restrict_form(const Matrix& basis, const Matrix& hessian, Vector multiplier = {});

struct PsdVerdict {
  bool holds = true;
  double lambda_min = 0.0;  // 0 for an empty subspace
  double threshold = 0.0;   // holds iff lambda_min >= threshold
  Vector witness;           // ambient direction of lambda_min (empty when s = 0)
};

PsdVerdict wsoc_check(const RestrictedForm& rf, double eps_psd = kDefaultPsdTol);

// K = L ⊕ ray(d0).
struct FirstOrderCone {
  Matrix lineality;          // n x l orthonormal (l may be 0)
  std::optional<Vector> ray; // unit, orthogonal to lineality

  Matrix span_basis() const;
};

// Quadratic forms are even and every v in span(K) has v or -v in K, so
// nonnegativity on K is nonnegativity on span(K).
PsdVerdict ssoc_first_order_check(const Matrix& hessian, const FirstOrderCone& cone, double eps_psd = kDefaultPsdTol);

struct MfcqReport {
  bool holds = false;
  bool equality_independent = true;
  std::optional<Vector> direction;
  double margin = 0.0;
};

MfcqReport check_mfcq(const StationaryPointAnalysis& a);

// {d : E d = 0, G d <= 0}.
struct LinearCone {
  Matrix equalities;
  Matrix inequalities;
  std::vector<std::size_t> eq_rows;    // Jacobian rows used as equalities (objective row excluded)
  std::vector<std::size_t> ineq_rows;

  bool contains(std::span<const double> d, double tol = 1e-9) const;
};

// Critical cone from ∇f and the constraint gradients.
LinearCone critical_cone_gradients(const StationaryPointAnalysis& a);
// Critical cone written through a multiplier ν ∈ Λ(x*).
LinearCone critical_cone_multiplier(const StationaryPointAnalysis& a, std::span<const double> nu, double pos_tol = 1e-10);

// Builds the first-order cone C(x*) when GSCS holds; nullopt otherwise.
std::optional<FirstOrderCone> gscs_cone(const StationaryPointAnalysis& a, const MultiplierPolytope& p,
                                        const GscsResult& g);

// Coefficients of ν ↦ dᵀ∇²L(ν)d: value = constant + coef·ν.
struct FormCoefficients {
  double constant = 0.0;
  Vector coef;
};
FormCoefficients form_coefficients(const StationaryPointAnalysis& a, std::span<const double> d);

// Unit directions in s-dimensional coordinates: a full circle for s = 2, a
// Fibonacci sphere for s = 3, ±e_i plus random directions otherwise.
std::vector<Vector> sample_directions(std::size_t s, std::size_t count, std::uint64_t seed);

struct DirectionwiseResult {
  std::size_t directions = 0;
  double worst_value = 0.0;
  Vector worst_direction;   // ambient
  Vector worst_multiplier;
};

DirectionwiseResult directionwise_necessary(const MultiplierPolytope& p, const StationaryPointAnalysis& a,
                                            const Matrix& basis, const std::vector<Vector>& directions);

struct FjDirectionResult {
  double value = 0.0;
  Vector point;  // (λ₀, λ, μ)
};

FjDirectionResult fritz_john_directionwise(const FritzJohnPolytope& fj, const StationaryPointAnalysis& a,
                                           std::span<const double> d);

struct YuanResult {
  enum class Kind { Combined, Refuted, Inconclusive };
  Kind kind = Kind::Inconclusive;
  double alpha = 0.0;
  double beta = 0.0;
  double lambda_min = 0.0;  // λmin(αP + βQ) at the returned or best α
  Vector witness;           // refutation direction (subspace coordinates)
  std::string diagnostics;
};

const char* to_string(YuanResult::Kind k);

// λmin of αP + (1-α)Q.
double combined_lambda_min(const Matrix& p, const Matrix& q, double alpha);

YuanResult yuan_combine(const Matrix& p, const Matrix& q, double eps_psd = kDefaultPsdTol);

struct WsocSearchResult {
  bool found = false;
  Vector multiplier;
  double lambda_min = 0.0;
  int iterations = 0;
};

// Conditional-gradient ascent of ν ↦ λmin(BᵀH(ν)B) over the polytope.
WsocSearchResult find_wsoc_multiplier(const MultiplierPolytope& p, const StationaryPointAnalysis& a,
                                      const Matrix& basis, int max_iter = 200, double eps_psd = kDefaultPsdTol);

// Golden-section maximization of a concave function on [lo, hi]; ties keep
// the left part of the bracket.
double golden_section_max(const std::function<double(double)>& f, double lo, double hi, double width);

}  // namespace socert
