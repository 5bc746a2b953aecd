#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "socert/linalg.hpp"
#include "socert/lp.hpp"
#include "socert/model.hpp"

namespace socert {

class PolytopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::size_t kMaxEnumerationDim = 12;
constexpr double kStationarityTol = 1e-8;
constexpr double kSignTol = 1e-10;

// {ν = (λ, μ) : lhs·ν = rhs, μ >= 0} with λ the first num_free coordinates.
// For Lagrange multipliers lhs = J(x*)ᵀ and rhs = -∇f(x*).
struct MultiplierPolytope {
  std::size_t num_free = 0;
  Matrix lhs;
  Vector rhs;
  bool empty = true;
  bool bounded = true;
  bool enumerated = false;
  std::vector<Vector> vertices;  // sorted descending lexicographically

  std::size_t dim() const { return lhs.cols(); }
  std::size_t num_signed() const { return dim() - num_free; }
  double residual(std::span<const double> nu) const;
  bool contains(std::span<const double> nu, double tol = kStationarityTol) const;
  // LP maximizing c·ν over the polytope.
  LinearProgram lp(std::span<const double> c) const;
};

MultiplierPolytope make_polytope(Matrix lhs, Vector rhs, std::size_t num_free);
MultiplierPolytope lagrange_polytope(const StationaryPointAnalysis& a);

// Normalized Fritz John multipliers. LP coordinates are
// (λ₀, λ⁺, λ⁻, μ) >= 0 with λ₀∇f + Jᵀ(λ⁺ - λ⁻, μ) = 0 and their sum = 1.
// Points are reported compactly as (λ₀, λ, μ).
struct FritzJohnPolytope {
  std::size_t num_free = 0;
  std::size_t num_signed = 0;
  Matrix lhs;
  Vector rhs;
  bool empty = true;

  std::size_t lp_dim() const { return 1 + 2 * num_free + num_signed; }
  LinearProgram lp(std::span<const double> c_compact) const;
  Vector compact(std::span<const double> lp_point) const;
};

FritzJohnPolytope fritz_john_polytope(const StationaryPointAnalysis& a);

// min over the FJ polytope of λ₀; positive iff no FJ point has λ₀ = 0.
std::optional<double> min_lambda0(const FritzJohnPolytope& fj);

struct LinearBounds {
  double min_value = 0.0;
  Vector argmin;
  double max_value = 0.0;
  Vector argmax;
};

LinearBounds linear_bounds(const MultiplierPolytope& p, std::span<const double> c);

struct GscsResult {
  bool holds = false;
  std::vector<std::size_t> zero_indices;  // 0-based among the signed coordinates
  std::optional<std::size_t> i_star;
  Vector maxima;
};

GscsResult gscs_check(const MultiplierPolytope& p, double zero_tol = 1e-9);

}  // namespace socert
