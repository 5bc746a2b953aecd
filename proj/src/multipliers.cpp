#include "socert/multipliers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace socert {

double MultiplierPolytope::residual(std::span<const double> nu) const {
  if (nu.size() != dim()) throw PolytopeError("multiplier dimension mismatch");
  if (dim() == 0) return norm_inf(rhs);
  const Vector r = axpy(-1.0, rhs, lhs * nu);
  return norm_inf(r);
}

bool MultiplierPolytope::contains(std::span<const double> nu, double tol) const {
  if (residual(nu) > tol) return false;
  for (std::size_t i = num_free; i < dim(); ++i)
    if (nu[i] < -kSignTol) return false;
  return true;
}

LinearProgram MultiplierPolytope::lp(std::span<const double> c) const {
  LinearProgram prog;
  prog.objective.assign(c.begin(), c.end());
  prog.a = lhs;
  prog.b = rhs;
  prog.sign.assign(dim(), VarSign::Nonnegative);
  for (std::size_t i = 0; i < num_free; ++i) prog.sign[i] = VarSign::Free;
  return prog;
}

namespace {

void snap(Vector& v) {
  for (double& x : v)
    if (std::abs(x) < 1e-13) x = 0.0;
}

std::vector<Vector> enumerate_vertices(const MultiplierPolytope& p) {
  const std::size_t d = p.dim();
  const std::size_t q = p.num_signed();
  const std::size_t n = p.lhs.rows();
  std::vector<Vector> found;
  for (std::size_t mask = 0; mask < (std::size_t{1} << q); ++mask) {
    const auto zeros = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (n + zeros < d) continue;
    Matrix sys(n + zeros, d);
    Vector rhs(n + zeros, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < d; ++c) sys(r, c) = p.lhs(r, c);
      rhs[r] = p.rhs[r];
    }
    std::size_t row = n;
    for (std::size_t j = 0; j < q; ++j)
      if (mask & (std::size_t{1} << j)) sys(row++, p.num_free + j) = 1.0;
    const SvdResult s = svd(sys);
    if (s.rank < d) continue;
    Vector nu = pinv_solve(sys, rhs);
    snap(nu);
    if (!p.contains(nu, 1e-9)) continue;
    const bool dup = std::any_of(found.begin(), found.end(), [&](const Vector& w) {
      return norm_inf(axpy(-1.0, w, nu)) <= 1e-9;
    });
    if (!dup) found.push_back(std::move(nu));
  }
  std::sort(found.begin(), found.end(), [](const Vector& a, const Vector& b) {
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
  });
  return found;
}

}  // namespace

MultiplierPolytope make_polytope(Matrix lhs, Vector rhs, std::size_t num_free) {
  MultiplierPolytope p;
  p.num_free = num_free;
  p.lhs = std::move(lhs);
  p.rhs = std::move(rhs);
  if (p.lhs.rows() != p.rhs.size() || num_free > p.dim()) throw PolytopeError("inconsistent polytope system");

  if (p.dim() == 0) {
    p.empty = norm_inf(p.rhs) > 1e-9;
    p.bounded = true;
    p.enumerated = true;
    if (!p.empty) p.vertices.push_back({});
    return p;
  }

  const LpResult feas = lp_solve(p.lp(Vector(p.dim(), 0.0)));
  p.empty = feas.status == LpStatus::Infeasible;
  if (p.empty) {
    p.enumerated = true;
    return p;
  }

  bool free_independent = true;
  if (num_free > 0) {
    Matrix free_cols(p.lhs.rows(), num_free);
    for (std::size_t r = 0; r < p.lhs.rows(); ++r)
      for (std::size_t c = 0; c < num_free; ++c) free_cols(r, c) = p.lhs(r, c);
    free_independent = p.lhs.rows() > 0 && svd(free_cols).rank == num_free;
  }
  bool no_recession = true;
  if (p.num_signed() > 0) {
    Vector c(p.dim(), 0.0);
    for (std::size_t i = num_free; i < p.dim(); ++i) c[i] = 1.0;
    LinearProgram rec = p.lp(c);
    rec.b.assign(p.rhs.size(), 0.0);
    rec.upper.assign(p.dim(), std::numeric_limits<double>::infinity());
    for (std::size_t i = num_free; i < p.dim(); ++i) rec.upper[i] = 1.0;
    const LpResult r = lp_solve(rec);
    no_recession = r.status == LpStatus::Optimal && r.value <= 1e-9;
  }
  p.bounded = free_independent && no_recession;

  if (p.dim() <= kMaxEnumerationDim) {
    p.vertices = enumerate_vertices(p);
    p.enumerated = true;
  }
  return p;
}

MultiplierPolytope lagrange_polytope(const StationaryPointAnalysis& a) {
  return make_polytope(a.jacobian.rows() == 0 ? Matrix(a.dim(), 0) : a.jacobian.transpose(), scaled(-1.0, a.grad_f),
                       a.num_equalities);
}

LinearProgram FritzJohnPolytope::lp(std::span<const double> c) const {
  if (c.size() != 1 + num_free + num_signed) throw PolytopeError("Fritz John objective dimension mismatch");
  LinearProgram prog;
  prog.objective.assign(lp_dim(), 0.0);
  prog.objective[0] = c[0];
  for (std::size_t i = 0; i < num_free; ++i) {
    prog.objective[1 + i] = c[1 + i];
    prog.objective[1 + num_free + i] = -c[1 + i];
  }
  for (std::size_t j = 0; j < num_signed; ++j) prog.objective[1 + 2 * num_free + j] = c[1 + num_free + j];
  prog.a = lhs;
  prog.b = rhs;
  prog.sign.assign(lp_dim(), VarSign::Nonnegative);
  return prog;
}

Vector FritzJohnPolytope::compact(std::span<const double> z) const {
  Vector out(1 + num_free + num_signed);
  out[0] = z[0];
  for (std::size_t i = 0; i < num_free; ++i) out[1 + i] = z[1 + i] - z[1 + num_free + i];
  for (std::size_t j = 0; j < num_signed; ++j) out[1 + num_free + j] = z[1 + 2 * num_free + j];
  return out;
}

FritzJohnPolytope fritz_john_polytope(const StationaryPointAnalysis& a) {
  FritzJohnPolytope fj;
  fj.num_free = a.num_equalities;
  fj.num_signed = a.active.size();
  const std::size_t n = a.dim();
  fj.lhs = Matrix(n + 1, fj.lp_dim());
  fj.rhs.assign(n + 1, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    fj.lhs(r, 0) = a.grad_f[r];
    for (std::size_t i = 0; i < fj.num_free; ++i) {
      fj.lhs(r, 1 + i) = a.jacobian(i, r);
      fj.lhs(r, 1 + fj.num_free + i) = -a.jacobian(i, r);
    }
    for (std::size_t j = 0; j < fj.num_signed; ++j) fj.lhs(r, 1 + 2 * fj.num_free + j) = a.jacobian(fj.num_free + j, r);
  }
  for (std::size_t c = 0; c < fj.lp_dim(); ++c) fj.lhs(n, c) = 1.0;
  fj.rhs[n] = 1.0;
  fj.empty = lp_solve(fj.lp(Vector(1 + fj.num_free + fj.num_signed, 0.0))).status != LpStatus::Optimal;
  return fj;
}

std::optional<double> min_lambda0(const FritzJohnPolytope& fj) {
  if (fj.empty) return std::nullopt;
  Vector c(1 + fj.num_free + fj.num_signed, 0.0);
  c[0] = -1.0;
  const LpResult r = lp_solve(fj.lp(c));
  if (r.status != LpStatus::Optimal) return std::nullopt;
  return -r.value;
}

LinearBounds linear_bounds(const MultiplierPolytope& p, std::span<const double> c) {
  if (c.size() != p.dim()) throw PolytopeError("functional dimension mismatch");
  if (p.empty) throw PolytopeError("multiplier set is empty");
  if (p.dim() == 0) return {0.0, {}, 0.0, {}};
  const LpResult hi = lp_solve(p.lp(c));
  const LpResult lo = lp_solve(p.lp(scaled(-1.0, c)));
  if (hi.status == LpStatus::Unbounded || lo.status == LpStatus::Unbounded)
    throw PolytopeError("multiplier set is unbounded along the functional (MFCQ fails at this point)");
  if (hi.status != LpStatus::Optimal || lo.status != LpStatus::Optimal) throw PolytopeError("multiplier set is empty");
  return {-lo.value, lo.point, hi.value, hi.point};
}

GscsResult gscs_check(const MultiplierPolytope& p, double zero_tol) {
  if (p.empty) throw PolytopeError("multiplier set is empty");
  GscsResult g;
  for (std::size_t j = 0; j < p.num_signed(); ++j) {
    Vector c(p.dim(), 0.0);
    c[p.num_free + j] = 1.0;
    const LpResult r = lp_solve(p.lp(c));
    if (r.status == LpStatus::Unbounded) {
      g.maxima.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    g.maxima.push_back(r.value);
    if (r.value <= zero_tol) g.zero_indices.push_back(j);
  }
  g.holds = g.zero_indices.size() <= 1;
  if (g.zero_indices.size() == 1) g.i_star = g.zero_indices.front();
  return g;
}

}  // namespace socert
