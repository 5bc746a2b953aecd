#pragma once

#include <vector>

#include "socert/linalg.hpp"

namespace socert {

enum class VarSign { Free, Nonnegative };

// maximize cᵀz  s.t.  A z = b,  z_i >= 0 where sign[i] is Nonnegative,
// and lower[i] <= z_i <= upper[i] when the (optional) box vectors are given.
// Infinite box entries mean "no bound".
struct LinearProgram {
  Vector objective;
  Matrix a;
  Vector b;
  std::vector<VarSign> sign;
  Vector lower;
  Vector upper;

  std::size_t num_vars() const { return objective.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  Vector point;
};

// Dense two-phase simplex with Bland's rule. Degenerate optima resolve to
// whichever basis Bland's pivot order reaches first, so results are
// deterministic.
LpResult lp_solve(const LinearProgram& lp);

const char* to_string(LpStatus s);

}  // namespace socert
