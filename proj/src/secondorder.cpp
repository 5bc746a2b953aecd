#include "socert/secondorder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "socert/random.hpp"

namespace socert {

RestrictedForm restrict_form(const Matrix& basis, const Matrix& hessian, Vector multiplier) {
  return {basis, basis.cols() == 0 ? Matrix() : congruence(basis, hessian), std::move(multiplier)};
}

PsdVerdict wsoc_check(const RestrictedForm& rf, double eps_psd) {
  PsdVerdict v;
  if (rf.basis.cols() == 0) return v;
  const SymEigen e = sym_eigen(rf.form);
  v.lambda_min = e.values.front();
  v.threshold = -eps_psd * (1.0 + rf.form.frobenius());
  v.holds = v.lambda_min >= v.threshold;
  v.witness = rf.basis * e.vectors.col(0);
  canonical_sign(v.witness);
  return v;
}

Matrix FirstOrderCone::span_basis() const {
  if (!ray) return lineality;
  Matrix b(lineality.rows(), lineality.cols() + 1);
  for (std::size_t c = 0; c < lineality.cols(); ++c) b.set_col(c, lineality.col(c));
  b.set_col(lineality.cols(), *ray);
  return b;
}

PsdVerdict ssoc_first_order_check(const Matrix& hessian, const FirstOrderCone& cone, double eps_psd) {
  return wsoc_check(restrict_form(cone.span_basis(), hessian), eps_psd);
}

MfcqReport check_mfcq(const StationaryPointAnalysis& a) {
  MfcqReport rep;
  const std::size_t n = a.dim();
  const std::size_t m = a.num_equalities;
  const std::size_t q = a.active.size();
  if (m > 0) {
    Matrix jh(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t c = 0; c < n; ++c) jh(i, c) = a.jacobian(i, c);
    rep.equality_independent = svd(jh, a.rank_tol).rank == m;
  }

  // maximize t  s.t.  ∇h d = 0,  ∇g_j d + t + s_j = 0,  |d| <= 1,  t <= 1.
  const double inf = std::numeric_limits<double>::infinity();
  LinearProgram lp;
  const std::size_t nv = n + 1 + q;
  lp.objective.assign(nv, 0.0);
  lp.objective[n] = 1.0;
  lp.a = Matrix(m + q, nv);
  lp.b.assign(m + q, 0.0);
  lp.sign.assign(nv, VarSign::Free);
  lp.lower.assign(nv, -inf);
  lp.upper.assign(nv, inf);
  for (std::size_t c = 0; c < n; ++c) {
    lp.lower[c] = -1.0;
    lp.upper[c] = 1.0;
  }
  lp.upper[n] = 1.0;
  for (std::size_t r = 0; r < m + q; ++r)
    for (std::size_t c = 0; c < n; ++c) lp.a(r, c) = a.jacobian(r, c);
  for (std::size_t j = 0; j < q; ++j) {
    lp.a(m + j, n) = 1.0;
    lp.a(m + j, n + 1 + j) = 1.0;
    lp.sign[n + 1 + j] = VarSign::Nonnegative;
  }
  const LpResult first = lp_solve(lp);
  if (first.status != LpStatus::Optimal) {
    rep.holds = false;
    return rep;
  }
  rep.margin = first.value;
  rep.holds = rep.equality_independent && rep.margin > 1e-9;
  if (!rep.holds) return rep;

  // Among directions achieving the margin, report one of least l1 norm.
  const double target = rep.margin;
  LinearProgram l1;
  const std::size_t nv2 = 2 * n + q;
  l1.objective.assign(nv2, 0.0);
  for (std::size_t c = 0; c < 2 * n; ++c) l1.objective[c] = -1.0;
  l1.a = Matrix(m + q, nv2);
  l1.b.assign(m + q, 0.0);
  l1.sign.assign(nv2, VarSign::Nonnegative);
  l1.upper.assign(nv2, inf);
  for (std::size_t c = 0; c < 2 * n; ++c) l1.upper[c] = 1.0;
  for (std::size_t r = 0; r < m + q; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      l1.a(r, c) = a.jacobian(r, c);
      l1.a(r, n + c) = -a.jacobian(r, c);
    }
  for (std::size_t j = 0; j < q; ++j) {
    l1.a(m + j, 2 * n + j) = 1.0;
    l1.b[m + j] = -target;
  }
  const LpResult second = lp_solve(l1);
  Vector d(n);
  if (second.status == LpStatus::Optimal) {
    for (std::size_t c = 0; c < n; ++c) d[c] = second.point[c] - second.point[n + c];
  } else {
    for (std::size_t c = 0; c < n; ++c) d[c] = first.point[c];
  }
  for (double& x : d)
    if (std::abs(x) < 1e-13) x = 0.0;
  rep.direction = d;
  return rep;
}

bool LinearCone::contains(std::span<const double> d, double tol) const {
  if (!equalities.empty())
    for (double v : equalities * d)
      if (std::abs(v) > tol) return false;
  if (!inequalities.empty())
    for (double v : inequalities * d)
      if (v > tol) return false;
  return true;
}

namespace {

Matrix rows_of(const Matrix& src, const std::vector<std::size_t>& idx, const Vector* extra_first = nullptr) {
  const std::size_t extra = extra_first ? 1 : 0;
  Matrix out(idx.size() + extra, src.cols());
  if (extra_first)
    for (std::size_t c = 0; c < src.cols(); ++c) out(0, c) = (*extra_first)[c];
  for (std::size_t k = 0; k < idx.size(); ++k)
    for (std::size_t c = 0; c < src.cols(); ++c) out(k + extra, c) = src(idx[k], c);
  return out;
}

}  // namespace

LinearCone critical_cone_gradients(const StationaryPointAnalysis& a) {
  LinearCone cone;
  for (std::size_t i = 0; i < a.num_equalities; ++i) cone.eq_rows.push_back(i);
  for (std::size_t r = a.num_equalities; r < a.rows(); ++r) cone.ineq_rows.push_back(r);
  cone.equalities = rows_of(a.jacobian, cone.eq_rows, &a.grad_f);
  cone.inequalities = rows_of(a.jacobian, cone.ineq_rows);
  return cone;
}

LinearCone critical_cone_multiplier(const StationaryPointAnalysis& a, std::span<const double> nu, double pos_tol) {
  if (nu.size() != a.rows()) throw DataError("multiplier dimension mismatch");
  LinearCone cone;
  for (std::size_t i = 0; i < a.num_equalities; ++i) cone.eq_rows.push_back(i);
  for (std::size_t r = a.num_equalities; r < a.rows(); ++r) (nu[r] > pos_tol ? cone.eq_rows : cone.ineq_rows).push_back(r);
  cone.equalities = rows_of(a.jacobian, cone.eq_rows);
  cone.inequalities = rows_of(a.jacobian, cone.ineq_rows);
  return cone;
}

std::optional<FirstOrderCone> gscs_cone(const StationaryPointAnalysis& a, const MultiplierPolytope&, const GscsResult& g) {
  if (!g.holds) return std::nullopt;
  FirstOrderCone cone;
  cone.lineality = a.critical_basis;
  if (!g.i_star) return cone;
  const std::size_t skip = a.num_equalities + *g.i_star;
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < a.rows(); ++r)
    if (r != skip) keep.push_back(r);
  const Matrix relaxed = keep.empty() ? Matrix::identity(a.dim()) : nullspace(rows_of(a.jacobian, keep), a.rank_tol);
  if (relaxed.cols() <= cone.lineality.cols()) return cone;
  // The relaxed space exceeds the lineality space by one dimension; the ray
  // is its unit component orthogonal to the lineality space.
  Vector best;
  double best_norm = 0.0;
  for (std::size_t c = 0; c < relaxed.cols(); ++c) {
    Vector v = relaxed.col(c);
    for (std::size_t k = 0; k < cone.lineality.cols(); ++k) {
      const Vector l = cone.lineality.col(k);
      v = axpy(-dot(l, v), l, v);
    }
    const double nv = norm2(v);
    if (nv > best_norm) {
      best_norm = nv;
      best = v;
    }
  }
  if (best_norm < 1e-8) return cone;
  Vector ray = scaled(1.0 / best_norm, best);
  if (dot(a.jacobian.row(skip), ray) > 0.0) ray = scaled(-1.0, ray);
  cone.ray = ray;
  return cone;
}

FormCoefficients form_coefficients(const StationaryPointAnalysis& a, std::span<const double> d) {
  FormCoefficients fc;
  fc.constant = quad_form(a.hess_f, d);
  fc.coef.resize(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) fc.coef[r] = quad_form(a.row_hessians[r], d);
  return fc;
}

std::vector<Vector> sample_directions(std::size_t s, std::size_t count, std::uint64_t seed) {
  std::vector<Vector> out;
  if (s == 0) return out;
  if (s == 1) return {Vector{1.0}};
  if (s == 2) {
    for (std::size_t k = 0; k < count; ++k) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
      out.push_back({std::cos(t), std::sin(t)});
    }
    return out;
  }
  if (s == 3) {
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden_angle * static_cast<double>(k);
      out.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    return out;
  }
  for (std::size_t i = 0; i < s; ++i)
    for (double sign : {1.0, -1.0}) {
      Vector e(s, 0.0);
      e[i] = sign;
      out.push_back(e);
    }
  for (std::size_t k = out.size(); k < count; ++k) {
    Rng rng(seed, k);
    out.push_back(rng.unit_vector(s));
  }
  return out;
}

DirectionwiseResult directionwise_necessary(const MultiplierPolytope& p, const StationaryPointAnalysis& a,
                                            const Matrix& basis, const std::vector<Vector>& directions) {
  if (p.empty) throw PolytopeError("multiplier set is empty");
  DirectionwiseResult res;
  res.worst_value = std::numeric_limits<double>::infinity();
  for (const Vector& coords : directions) {
    const Vector d = basis * coords;
    const FormCoefficients fc = form_coefficients(a, d);
    double value = fc.constant;
    Vector arg;
    if (p.dim() > 0) {
      const LpResult r = lp_solve(p.lp(fc.coef));
      if (r.status == LpStatus::Unbounded)
        throw PolytopeError("direction-wise LP is unbounded (multiplier set unbounded; MFCQ fails)");
      if (r.status != LpStatus::Optimal) throw PolytopeError("multiplier set is empty");
      value += r.value;
      arg = r.point;
    }
    ++res.directions;
    if (value < res.worst_value) {
      res.worst_value = value;
      res.worst_direction = d;
      res.worst_multiplier = arg;
    }
  }
  if (res.directions == 0) res.worst_value = 0.0;
  return res;
}

FjDirectionResult fritz_john_directionwise(const FritzJohnPolytope& fj, const StationaryPointAnalysis& a,
                                           std::span<const double> d) {
  if (fj.empty) throw PolytopeError("Fritz John multiplier set is empty");
  const FormCoefficients fc = form_coefficients(a, d);
  Vector c(1 + fc.coef.size());
  c[0] = fc.constant;
  std::copy(fc.coef.begin(), fc.coef.end(), c.begin() + 1);
  const LpResult r = lp_solve(fj.lp(c));
  if (r.status != LpStatus::Optimal) throw PolytopeError("Fritz John LP failed");
  return {r.value, fj.compact(r.point)};
}

const char* to_string(YuanResult::Kind k) {
  switch (k) {
    case YuanResult::Kind::Combined: return "combined";
    case YuanResult::Kind::Refuted: return "refuted";
    case YuanResult::Kind::Inconclusive: return "inconclusive";
  }
  return "?";
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi, double width) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > width) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

namespace {

Matrix combine(const Matrix& p, const Matrix& q, double alpha) { return alpha * p + (1.0 - alpha) * q; }

double psd_threshold(const Matrix& m, double eps) { return -eps * (1.0 + m.frobenius()); }

}  // namespace

double combined_lambda_min(const Matrix& p, const Matrix& q, double alpha) {
  return sym_eigen(combine(p, q, alpha)).values.front();
}

YuanResult yuan_combine(const Matrix& p, const Matrix& q, double eps_psd) {
  if (p.rows() != p.cols() || q.rows() != q.cols() || p.rows() != q.rows())
    throw LinalgError("yuan_combine needs two square matrices of equal size");
  YuanResult res;
  const std::size_t s = p.rows();
  if (s == 0) {
    res.kind = YuanResult::Kind::Combined;
    res.alpha = 1.0;
    return res;
  }
  auto phi = [&](double alpha) { return combined_lambda_min(p, q, alpha); };
  auto accept = [&](double alpha) {
    const double value = phi(alpha);
    return std::pair{value >= psd_threshold(combine(p, q, alpha), eps_psd), value};
  };

  double best = golden_section_max(phi, 0.0, 1.0, 1e-10);
  double best_value = phi(best);
  for (double end : {1.0, 0.0}) {
    const double v = phi(end);
    if (v > best_value || (std::abs(best - end) < 1e-8 && v >= best_value)) {
      best = end;
      best_value = v;
    }
  }
  auto finish_combined = [&](double alpha, double value) {
    res.kind = YuanResult::Kind::Combined;
    res.alpha = alpha;
    res.beta = 1.0 - alpha;
    res.lambda_min = value;
    return res;
  };
  if (accept(best).first) return finish_combined(best, best_value);

  res.alpha = best;
  res.beta = 1.0 - best;
  res.lambda_min = best_value;
  auto worst_of_pair = [&](const Vector& d) { return std::max(quad_form(p, d), quad_form(q, d)); };
  auto refuted_by = [&](Vector d) {
    if (norm2(d) == 0.0) return false;
    d = normalized(d);
    if (worst_of_pair(d) < -eps_psd) {
      canonical_sign(d);
      res.kind = YuanResult::Kind::Refuted;
      res.witness = d;
      return true;
    }
    return false;
  };

  const Matrix m = combine(p, q, best);
  const SymEigen e = sym_eigen(m);
  if (refuted_by(e.vectors.col(0))) return res;

  // Escalation 1: inside the bottom eigenspace at α*, balance the two forms.
  const double cluster = e.values.front() + 1e-8 * (1.0 + m.frobenius());
  std::vector<Vector> space;
  for (std::size_t k = 0; k < s && e.values[k] <= cluster; ++k) space.push_back(e.vectors.col(k));
  if (space.size() >= 1) {
    const Matrix basis = Matrix::from_columns(space, s);
    const SymEigen r = sym_eigen(congruence(basis, p - q));
    const double lo = r.values.front();
    const double hi = r.values.back();
    if (lo <= 0.0 && hi >= 0.0) {
      const double theta = hi > 0.0 ? std::atan(std::sqrt(-lo / hi)) : 0.0;
      const Vector coords = axpy(std::sin(theta), r.vectors.col(r.values.size() - 1),
                                 scaled(std::cos(theta), r.vectors.col(0)));
      if (refuted_by(basis * coords)) return res;
    }
  }

  // Escalation 2: the plane of the bottom eigenvectors of P and Q.
  const Vector pv = sym_eigen(p).vectors.col(0);
  const Vector qv = sym_eigen(q).vectors.col(0);
  constexpr int kGrid = 3600;
  for (int k = 0; k < kGrid; ++k) {
    const double t = std::numbers::pi * k / kGrid;
    if (refuted_by(axpy(std::sin(t), qv, scaled(std::cos(t), pv)))) return res;
  }

  // Escalation 3: a uniform grid on α.
  for (int k = 0; k <= kGrid; ++k) {
    const double alpha = static_cast<double>(k) / kGrid;
    const auto [ok, value] = accept(alpha);
    if (ok) return finish_combined(alpha, value);
    if (refuted_by(sym_eigen(combine(p, q, alpha)).vectors.col(0))) return res;
  }

  std::ostringstream diag;
  diag << "best alpha " << best << " with lambda_min " << best_value
       << "; no balanced witness found in the bottom eigenspace or on the alpha grid";
  res.kind = YuanResult::Kind::Inconclusive;
  res.diagnostics = diag.str();
  return res;
}

WsocSearchResult find_wsoc_multiplier(const MultiplierPolytope& p, const StationaryPointAnalysis& a,
                                      const Matrix& basis, int max_iter, double eps_psd) {
  if (p.empty) throw PolytopeError("multiplier set is empty");
  if (!p.bounded) throw PolytopeError("multiplier set is unbounded (MFCQ fails); the search needs a polytope");
  if (!p.enumerated || p.vertices.empty()) throw PolytopeError("vertex enumeration is unavailable");

  WsocSearchResult res;
  if (basis.cols() == 0) {
    res.found = true;
    res.multiplier = p.vertices.front();
    return res;
  }
  auto form_at = [&](std::span<const double> nu) { return congruence(basis, lagrangian_hessian(a, nu)); };
  auto phi = [&](std::span<const double> nu) { return sym_eigen(form_at(nu)).values.front(); };
  auto passes = [&](std::span<const double> nu, double value) {
    return value >= psd_threshold(form_at(nu), eps_psd);
  };

  Vector nu = p.vertices.front();
  double value = phi(nu);
  for (const Vector& v : p.vertices) {
    const double f = phi(v);
    if (f > value) {
      value = f;
      nu = v;
    }
  }
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    if (passes(nu, value)) break;
    const Vector bottom = sym_eigen(form_at(nu)).vectors.col(0);
    const FormCoefficients fc = form_coefficients(a, basis * bottom);
    const LpResult lp = lp_solve(p.lp(fc.coef));
    if (lp.status != LpStatus::Optimal) break;
    const Vector step = axpy(-1.0, nu, lp.point);
    if (norm_inf(step) < 1e-14) break;
    auto along = [&](double g) { return phi(axpy(g, step, nu)); };
    const double gamma = golden_section_max(along, 0.0, 1.0, 1e-12);
    const double next = along(gamma);
    if (next <= value + 1e-15) break;
    nu = axpy(gamma, step, nu);
    value = next;
  }
  res.multiplier = nu;
  res.lambda_min = value;
  res.found = passes(nu, value);
  return res;
}

}  // namespace socert
