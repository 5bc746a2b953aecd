#include "socert/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace socert {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kReducedCostTol = 1e-9;
constexpr int kMaxPivots = 100000;

// z_i = offset + Σ coeff_k y_{col_k}, y >= 0.
struct VarMap {
  double offset = 0.0;
  std::vector<std::pair<std::size_t, double>> terms;
};

struct Tableau {
  Matrix t;  // rows x (cols + 1); last column is the right-hand side
  std::vector<std::size_t> basis;
  Vector cost_row;  // reduced costs; last entry is -objective value
  std::size_t cols = 0;

  double& rhs(std::size_t r) { return t(r, cols); }

  void pivot(std::size_t r, std::size_t c) {
    const double p = t(r, c);
    for (std::size_t j = 0; j <= cols; ++j) t(r, j) /= p;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      if (i == r) continue;
      const double f = t(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols; ++j) t(i, j) -= f * t(r, j);
      t(i, c) = 0.0;
    }
    const double f = cost_row[c];
    if (f != 0.0) {
      for (std::size_t j = 0; j <= cols; ++j) cost_row[j] -= f * t(r, j);
      cost_row[c] = 0.0;
    }
    basis[r] = c;
  }

  void price(const Vector& c) {
    cost_row.assign(cols + 1, 0.0);
    for (std::size_t j = 0; j < cols; ++j) cost_row[j] = c[j];
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double cb = c[basis[r]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= cols; ++j) cost_row[j] -= cb * t(r, j);
    }
  }

  // Bland's rule. Returns false when unbounded.
  bool optimize(const std::vector<bool>& allowed) {
    for (int it = 0; it < kMaxPivots; ++it) {
      std::size_t enter = cols;
      for (std::size_t j = 0; j < cols; ++j)
        if (allowed[j] && cost_row[j] > kReducedCostTol) {
          enter = j;
          break;
        }
      if (enter == cols) return true;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < t.rows(); ++r)
        if (t(r, enter) > kPivotTol) best = std::min(best, rhs(r) / t(r, enter));
      if (!std::isfinite(best)) return false;
      // Ties on the ratio go to the lowest-index basic variable.
      std::size_t leave = t.rows();
      const double slack = 1e-12 * (1.0 + std::abs(best));
      for (std::size_t r = 0; r < t.rows(); ++r) {
        if (t(r, enter) <= kPivotTol || rhs(r) / t(r, enter) > best + slack) continue;
        if (leave == t.rows() || basis[r] < basis[leave]) leave = r;
      }
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex iteration limit reached");
  }
};

}  // namespace

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

LpResult lp_solve(const LinearProgram& lp) {
  const std::size_t nv = lp.num_vars();
  const std::size_t neq = lp.b.size();
  if (lp.sign.size() != nv || (neq > 0 && (lp.a.rows() != neq || lp.a.cols() != nv)) ||
      (!lp.lower.empty() && lp.lower.size() != nv) || (!lp.upper.empty() && lp.upper.size() != nv))
    throw std::invalid_argument("linear program dimensions are inconsistent");

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<VarMap> maps(nv);
  std::size_t ny = 0;
  struct BoundRow {
    std::size_t col;
    double cap;
  };
  std::vector<BoundRow> bound_rows;
  for (std::size_t i = 0; i < nv; ++i) {
    double lo = lp.lower.empty() ? -inf : lp.lower[i];
    const double hi = lp.upper.empty() ? inf : lp.upper[i];
    if (lp.sign[i] == VarSign::Nonnegative) lo = std::max(lo, 0.0);
    if (lo > hi) return {LpStatus::Infeasible, 0.0, {}};
    if (std::isfinite(lo)) {
      maps[i] = {lo, {{ny, 1.0}}};
      if (std::isfinite(hi)) bound_rows.push_back({ny, hi - lo});
      ++ny;
    } else if (std::isfinite(hi)) {
      maps[i] = {hi, {{ny, -1.0}}};
      ++ny;
    } else {
      maps[i] = {0.0, {{ny, 1.0}, {ny + 1, -1.0}}};
      ny += 2;
    }
  }
  const std::size_t nslack = bound_rows.size();
  const std::size_t rows = neq + nslack;
  const std::size_t real_cols = ny + nslack;
  const std::size_t cols = real_cols + rows;  // artificials last

  Tableau tab;
  tab.cols = cols;
  tab.t = Matrix(rows, cols + 1);
  tab.basis.resize(rows);
  for (std::size_t r = 0; r < neq; ++r) {
    double rhs = lp.b[r];
    for (std::size_t i = 0; i < nv; ++i) {
      const double a = lp.a(r, i);
      if (a == 0.0) continue;
      rhs -= a * maps[i].offset;
      for (const auto& [k, coef] : maps[i].terms) tab.t(r, k) += a * coef;
    }
    tab.rhs(r) = rhs;
  }
  for (std::size_t s = 0; s < nslack; ++s) {
    const std::size_t r = neq + s;
    tab.t(r, bound_rows[s].col) = 1.0;
    tab.t(r, ny + s) = 1.0;
    tab.rhs(r) = bound_rows[s].cap;
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (tab.rhs(r) < 0.0)
      for (std::size_t j = 0; j <= cols; ++j) tab.t(r, j) = -tab.t(r, j);
    tab.t(r, real_cols + r) = 1.0;
    tab.basis[r] = real_cols + r;
  }

  // Phase 1: maximize -(sum of artificials).
  Vector c1(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) c1[real_cols + r] = -1.0;
  tab.price(c1);
  std::vector<bool> all(cols, true);
  tab.optimize(all);
  double bscale = 1.0;
  for (std::size_t r = 0; r < rows; ++r) bscale = std::max(bscale, std::abs(tab.rhs(r)));
  if (tab.cost_row[cols] > 1e-9 * bscale) return {LpStatus::Infeasible, 0.0, {}};

  // Drive remaining artificials out of the basis; rows where that fails are
  // redundant and stay pinned to an artificial at level zero.
  for (std::size_t r = 0; r < rows; ++r) {
    if (tab.basis[r] < real_cols) continue;
    for (std::size_t j = 0; j < real_cols; ++j) {
      if (std::abs(tab.t(r, j)) > 1e-9) {
        tab.pivot(r, j);
        break;
      }
    }
  }

  // Phase 2.
  Vector c2(cols, 0.0);
  for (std::size_t i = 0; i < nv; ++i)
    for (const auto& [k, coef] : maps[i].terms) c2[k] += lp.objective[i] * coef;
  tab.price(c2);
  std::vector<bool> allowed(cols, false);
  for (std::size_t j = 0; j < real_cols; ++j) allowed[j] = true;
  if (!tab.optimize(allowed)) return {LpStatus::Unbounded, inf, {}};

  Vector y(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) y[tab.basis[r]] = tab.rhs(r);
  LpResult res;
  res.status = LpStatus::Optimal;
  res.point.assign(nv, 0.0);
  for (std::size_t i = 0; i < nv; ++i) {
    double z = maps[i].offset;
    for (const auto& [k, coef] : maps[i].terms) z += coef * y[k];
    res.point[i] = z;
  }
  res.value = dot(lp.objective, res.point);
  return res;
}

}  // namespace socert
