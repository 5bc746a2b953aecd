#include "socert/conjecture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "socert/random.hpp"

namespace socert {

namespace {

// Stream offsets keep the samplers of different stages independent.
constexpr std::uint64_t kRayStream = 1u << 20;
constexpr std::uint64_t kOracleStream = 2u << 20;
constexpr std::uint64_t kPairStream = 3u << 20;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Matrix kernel_of_transpose(const StationaryPointAnalysis& a) {
  if (a.rows() == 0) return Matrix();
  return nullspace(a.jacobian.transpose(), a.rank_tol);
}

Vector project(const Matrix& basis, std::span<const double> v) {
  Vector out(v.size(), 0.0);
  for (std::size_t c = 0; c < basis.cols(); ++c) {
    const Vector b = basis.col(c);
    out = axpy(dot(b, v), b, out);
  }
  return out;
}

Vector dirichlet_point(const std::vector<Vector>& vertices, Rng& rng) {
  Vector w(vertices.size());
  double total = 0.0;
  for (double& x : w) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    x = -std::log(u);
    total += x;
  }
  Vector nu(vertices.front().size(), 0.0);
  for (std::size_t k = 0; k < vertices.size(); ++k) nu = axpy(w[k] / total, vertices[k], nu);
  return nu;
}

Matrix restricted(const StationaryPointAnalysis& a, const Matrix& basis, std::span<const double> nu) {
  return congruence(basis, lagrangian_hessian(a, nu));
}

struct RayLimit {
  Vector u, v;
};

// Richardson extrapolation of a sequence sampled at s, s/2, s/4, ...
Vector richardson(std::vector<Vector> t) {
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double f = std::ldexp(1.0, static_cast<int>(k));
    for (std::size_t i = t.size() - 1; i >= k; --i) t[i] = scaled(1.0 / (f - 1.0), axpy(-1.0, t[i - 1], scaled(f, t[i])));
  }
  return t.back();
}

std::optional<RayLimit> ray_limit(const NlpProblem& p, const StationaryPointAnalysis& a, std::span<const double> w,
                                  double radius) {
  const std::size_t r = a.rank;
  std::vector<Vector> us, vs;
  for (int i = 0; i < 4; ++i) {
    const double s = std::ldexp(radius, -i);
    const Vector x = axpy(s, w, a.x);
    Matrix j;
    try {
      j = active_jacobian(p, a, x);
    } catch (const DomainError&) {
      return std::nullopt;
    }
    const SvdResult f = svd(j, a.rank_tol);
    if (r >= f.sigma.size())
      throw ConjectureError("J(x*) has no (r+1)-th singular value (r = " + std::to_string(r) + ")");
    if (f.rank <= r) return std::nullopt;
    Vector u = f.u.col(r), v = f.v.col(r);
    if (!us.empty()) {
      if (dot(u, us.back()) < 0.0) u = scaled(-1.0, u);
      if (dot(v, vs.back()) < 0.0) v = scaled(-1.0, v);
    }
    us.push_back(u);
    vs.push_back(v);
  }
  const Vector ul = richardson(us), vl = richardson(vs);
  if (norm2(ul) < 1e-12 || norm2(vl) < 1e-12) return std::nullopt;
  return RayLimit{normalized(ul), normalized(vl)};
}

Vector aligned_mean(const std::vector<Vector>& vs) {
  Vector sum(vs.front().size(), 0.0);
  for (const Vector& v : vs) sum = axpy(dot(v, vs.front()) < 0.0 ? -1.0 : 1.0, v, sum);
  return norm2(sum) < 1e-12 ? vs.front() : normalized(sum);
}

double max_pairwise_angle(const std::vector<Vector>& vs, Matrix* table = nullptr) {
  if (table) *table = Matrix(vs.size(), vs.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t k = i + 1; k < vs.size(); ++k) {
      const double ang = line_angle(vs[i], vs[k]);
      worst = std::max(worst, ang);
      if (table) (*table)(i, k) = (*table)(k, i) = ang;
    }
  return worst;
}

}  // namespace

double line_angle(std::span<const double> a, std::span<const double> b) {
  const double c = std::abs(dot(a, b)) / (norm2(a) * norm2(b));
  return std::acos(std::min(1.0, c));
}

RankProbeReport rank_probe(const NlpProblem& p, const StationaryPointAnalysis& a, double radius, std::size_t samples,
                           std::uint64_t seed) {
  if (radius <= 0.0) throw ConjectureError("probe radius must be positive");
  if (samples == 0) throw ConjectureError("probe needs at least one sample");
  RankProbeReport rep;
  rep.base_rank = a.rank;
  rep.radius = radius;
  rep.samples = samples;
  rep.max_rank = a.rank;
  std::vector<double> sig;
  for (std::size_t k = 0; k < samples; ++k) {
    Rng rng(seed, k);
    const Vector x = axpy(1.0, rng.in_ball(a.dim(), radius), a.x);
    Matrix j;
    try {
      j = active_jacobian(p, a, x);
    } catch (const DomainError&) {
      ++rep.skipped;
      continue;
    }
    if (j.rows() == 0) {
      ++rep.histogram[0];
      continue;
    }
    const SvdResult f = svd(j, a.rank_tol);
    ++rep.histogram[f.rank];
    rep.max_rank = std::max(rep.max_rank, f.rank);
    if (a.rank < f.sigma.size()) sig.push_back(f.sigma[a.rank]);
  }
  if (!sig.empty()) {
    std::sort(sig.begin(), sig.end());
    rep.sigma_min = sig.front();
    rep.sigma_median = sig[(sig.size() - 1) / 2];
    rep.sigma_max = sig.back();
  }
  return rep;
}

ActivatingDirection activating_direction(const NlpProblem& p, const StationaryPointAnalysis& a, double radius,
                                         std::size_t rays, std::uint64_t seed) {
  const Matrix kernel = kernel_of_transpose(a);
  if (kernel.cols() == 0) throw ConjectureError("Ker(J(x*)ᵀ) has dimension 0; no activating direction");

  ActivatingDirection ad;
  std::optional<Vector> numeric;
  std::string numeric_error;
  try {
    for (std::size_t k = 0; k < rays; ++k) {
      Rng rng(seed, kRayStream + k);
      const Vector w = rng.unit_vector(a.dim());
      const auto lim = ray_limit(p, a, w, radius);
      if (!lim) {
        ++ad.degenerate_rays;
        continue;
      }
      const Vector proj = project(kernel, lim->u);
      if (norm2(proj) < 1e-8) {
        ++ad.degenerate_rays;
        continue;
      }
      ad.estimates.push_back(normalized(proj));
    }
    if (ad.estimates.empty()) throw ConjectureError("no activating direction: every ray is degenerate");
    ad.consistent = max_pairwise_angle(ad.estimates, &ad.angles) <= 1e-3;
    Vector u = aligned_mean(ad.estimates);
    first_nonzero_positive(u);
    numeric = u;
  } catch (const ConjectureError& e) {
    numeric_error = e.what();
  }

  if (p.oracle) {
    const auto f = p.oracle->evaluate(a.x, a.rows(), a.dim());
    if (a.rank >= a.rows()) throw ConjectureError("oracle U(x*) has no column r+1");
    const Vector proj = project(kernel, f.u.col(a.rank));
    if (norm2(proj) < 1e-12) throw ConjectureError("oracle column r+1 of U(x*) has no component in Ker(J(x*)ᵀ)");
    ad.u = normalized(proj);
    first_nonzero_positive(ad.u);
    ad.source = "oracle";
    if (numeric) ad.cross_check_angle = line_angle(ad.u, *numeric);
    return ad;
  }
  if (!numeric) throw ConjectureError(numeric_error);
  ad.u = *numeric;
  ad.source = "numeric";
  return ad;
}

OracleValidation svd_oracle_validate(const NlpProblem& p, const StationaryPointAnalysis& a, double radius,
                                     std::size_t samples, double fd_step, std::uint64_t seed) {
  if (!p.oracle) throw ConjectureError("no SVD oracle in the problem file");
  const SvdOracle& oracle = *p.oracle;
  const std::size_t rows = a.rows(), n = a.dim();
  OracleValidation rep;
  std::size_t reconstruction_failures = 0, sigma_failures = 0;

  auto check_point = [&](std::span<const double> x, const std::string& where) {
    const SvdOracle::Factors f = oracle.evaluate(x, rows, n);
    const Matrix j = active_jacobian(p, a, x);
    Matrix sigma(rows, n);
    for (std::size_t k = 0; k < f.sigma.size(); ++k) sigma(k, k) = f.sigma[k];
    const double err = (f.u * sigma * f.v.transpose() - j).max_abs();
    rep.max_reconstruction = std::max(rep.max_reconstruction, err);
    if (err > 1e-9 && ++reconstruction_failures <= 5)
      rep.failures.push_back("reconstruction error " + fmt(err) + " at " + where);

    // σ may be signed and unordered; only the count of nonzero entries must
    // match the numeric rank.
    const SvdResult s = rows == 0 ? SvdResult{} : svd(j, a.rank_tol);
    const double sig_max = s.sigma.empty() ? 0.0 : s.sigma.front();
    const double thr = std::max(a.rank_tol.abs, a.rank_tol.rel * sig_max);
    std::size_t nonzero = 0;
    for (double v : f.sigma)
      if (std::abs(v) > thr) ++nonzero;
    if (nonzero != s.rank && ++sigma_failures <= 5)
      rep.failures.push_back("oracle has " + std::to_string(nonzero) + " nonzero singular values but rank(J) = " +
                             std::to_string(s.rank) + " at " + where);
    ++rep.points;
    return f;
  };

  try {
    const SvdOracle::Factors f0 = check_point(a.x, "x*");
    auto orthogonal_columns = [&](const Matrix& m, const char* name) {
      for (std::size_t i = 0; i < m.cols(); ++i) {
        if (norm2(m.col(i)) <= 1e-12)
          rep.failures.push_back(std::string(name) + "(x*) column " + std::to_string(i + 1) + " is zero");
        for (std::size_t k = i + 1; k < m.cols(); ++k) {
          const double ip = dot(m.col(i), m.col(k));
          if (std::abs(ip) > 1e-9)
            rep.failures.push_back(std::string(name) + "(x*) columns " + std::to_string(i + 1) + " and " +
                                   std::to_string(k + 1) + " are not orthogonal (inner product " + fmt(ip) + ")");
        }
      }
    };
    orthogonal_columns(f0.u, "U");
    orthogonal_columns(f0.v, "V");

    for (std::size_t k = 0; k < samples; ++k) {
      Rng rng(seed, kOracleStream + k);
      const Vector x = axpy(1.0, rng.in_ball(n, radius), a.x);
      check_point(x, "sample " + std::to_string(k + 1));
    }
  } catch (const DomainError& e) {
    rep.failures.push_back(std::string("domain error: ") + e.what());
  }
  if (reconstruction_failures > 5)
    rep.failures.push_back(std::to_string(reconstruction_failures - 5) + " further reconstruction failures");
  if (sigma_failures > 5) rep.failures.push_back(std::to_string(sigma_failures - 5) + " further singular value failures");

  // Differentiability evidence at x*: one-sided differences at h and h/2 agree.
  auto probe_entry = [&](const ScalarFunction& fn, const std::string& name) {
    for (std::size_t c = 0; c < n; ++c) {
      try {
        auto at = [&](double t) {
          Vector x = a.x;
          x[c] += t;
          return fn.eval(x);
        };
        const double f0 = at(0.0);
        const double h = fd_step;
        const double d[4] = {(at(h) - f0) / h, (f0 - at(-h)) / h, (at(h / 2) - f0) / (h / 2),
                             (f0 - at(-h / 2)) / (h / 2)};
        const double lo = *std::min_element(d, d + 4), hi = *std::max_element(d, d + 4);
        const double scale = std::max(std::abs(lo), std::abs(hi));
        if (hi - lo > 0.1 * scale + 100.0 * h)
          rep.failures.push_back(name + " is not differentiable in " + p.vars[c] + " at x* (difference quotients " +
                                 fmt(lo) + " .. " + fmt(hi) + ")");
      } catch (const DomainError& e) {
        rep.failures.push_back(name + ": domain error near x*: " + e.what());
      }
    }
  };
  for (const auto& [ij, fn] : oracle.u)
    probe_entry(fn, "svd_u(" + std::to_string(ij.first + 1) + "," + std::to_string(ij.second + 1) + ")");
  for (const auto& [k, fn] : oracle.sigma) probe_entry(fn, "svd_sigma(" + std::to_string(k + 1) + ")");
  for (const auto& [ij, fn] : oracle.v)
    probe_entry(fn, "svd_v(" + std::to_string(ij.first + 1) + "," + std::to_string(ij.second + 1) + ")");

  rep.passed = rep.failures.empty();
  return rep;
}

DeviationReport one_parameter_check(const MultiplierPolytope& p, const StationaryPointAnalysis& a, const Matrix& basis,
                                    std::span<const double> u, std::size_t trials, std::uint64_t seed) {
  DeviationReport rep;
  if (p.empty || !p.enumerated) throw PolytopeError("one-parameter check needs an enumerated nonempty polytope");
  if (u.size() != p.dim()) throw ConjectureError("activating direction has the wrong dimension");
  if (p.vertices.size() < 2) {
    rep.vacuous = true;
    rep.reason = "Λ(x*) is a single point";
    return rep;
  }
  if (nullspace(p.lhs).cols() <= 1) {
    rep.vacuous = true;
    rep.reason = "Ker(J(x*)ᵀ) has dimension 1";
    return rep;
  }
  for (std::size_t k = 0; k < trials; ++k) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      Rng rng(seed, kPairStream + 64 * k + static_cast<std::uint64_t>(attempt));
      const Vector nu = dirichlet_point(p.vertices, rng);
      Vector other = dirichlet_point(p.vertices, rng);
      // Move along û onto the level set of τ through ν, then pull back
      // toward ν (which stays on that level set) until feasible.
      other = axpy(dot(u, nu) - dot(u, other), u, other);
      const Vector dir = axpy(-1.0, nu, other);
      double theta = 1.0;
      for (std::size_t i = p.num_free; i < p.dim(); ++i)
        if (other[i] < 0.0) theta = std::min(theta, nu[i] / (nu[i] - other[i]));
      if (theta < 1e-6) continue;
      const Vector partner = axpy(theta, dir, nu);
      const double dev = basis.cols() == 0 ? 0.0 : (restricted(a, basis, nu) - restricted(a, basis, partner)).max_abs();
      rep.max_deviation = std::max(rep.max_deviation, dev);
      ++rep.pairs;
      break;
    }
  }
  return rep;
}

DeviationReport constant_rank_independence(const MultiplierPolytope& p, const StationaryPointAnalysis& a,
                                           const Matrix& basis, const RankProbeReport& probe, std::size_t trials,
                                           std::uint64_t seed) {
  DeviationReport rep;
  if (probe.max_rank != probe.base_rank) {
    rep.declined = true;
    rep.reason = "rank is not constant near x* (r = " + std::to_string(probe.base_rank) +
                 ", observed up to " + std::to_string(probe.max_rank) + ")";
    return rep;
  }
  if (p.empty || !p.enumerated) throw PolytopeError("constant-rank check needs an enumerated nonempty polytope");
  if (p.vertices.size() < 2 || basis.cols() == 0) return rep;
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng(seed, kPairStream + 64 * k);
    const Vector nu = dirichlet_point(p.vertices, rng);
    const Vector other = dirichlet_point(p.vertices, rng);
    rep.max_deviation = std::max(rep.max_deviation, (restricted(a, basis, nu) - restricted(a, basis, other)).max_abs());
    ++rep.pairs;
  }
  return rep;
}

const char* to_string(ConjectureCertificate::Verdict v) {
  switch (v) {
    case ConjectureCertificate::Verdict::Certified: return "certified";
    case ConjectureCertificate::Verdict::HypothesisRefuted: return "hypothesis-refuted";
    case ConjectureCertificate::Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

ConjectureCertificate conjecture_certificate(const StationaryPointAnalysis& a, const MultiplierPolytope& p,
                                             std::span<const double> u, const Matrix& basis, double eps_psd) {
  if (p.empty) throw ConjectureError("precondition: Λ(x*) is empty");
  if (!p.bounded) throw ConjectureError("precondition: Λ(x*) is unbounded (MFCQ fails)");
  if (!p.enumerated || p.vertices.empty()) throw ConjectureError("precondition: Λ(x*) vertices are not enumerated");
  if (u.size() != p.dim()) throw ConjectureError("precondition: û has the wrong dimension");
  if (std::abs(norm2(u) - 1.0) > 1e-8) throw ConjectureError("precondition: û is not a unit vector");
  if (p.dim() > 0 && norm_inf(p.lhs * u) > 1e-8) throw ConjectureError("precondition: û is not in Ker(J(x*)ᵀ)");

  ConjectureCertificate c;
  c.mu_bar = p.vertices.front();
  c.u.assign(u.begin(), u.end());

  if (basis.cols() == 0) {
    c.verdict = ConjectureCertificate::Verdict::Certified;
    c.mu_hat = c.mu_bar;
    c.nu_a = c.nu_b = c.mu_bar;
    c.yuan.kind = YuanResult::Kind::Combined;
    c.yuan.alpha = 1.0;
    c.notes.push_back("critical subspace is {0}; WSOC holds trivially");
    return c;
  }

  const double base = dot(u, c.mu_bar);
  const LinearBounds lb = linear_bounds(p, u);
  c.a_star = lb.min_value - base;
  c.b_star = lb.max_value - base;
  c.nu_a = lb.argmin.empty() ? c.mu_bar : lb.argmin;
  c.nu_b = lb.argmax.empty() ? c.mu_bar : lb.argmax;
  c.p_form = restricted(a, basis, c.nu_a);
  c.q_form = restricted(a, basis, c.nu_b);
  c.yuan = yuan_combine(c.p_form, c.q_form, eps_psd);

  if (c.yuan.kind == YuanResult::Kind::Refuted) {
    c.verdict = ConjectureCertificate::Verdict::HypothesisRefuted;
    c.witness = basis * c.yuan.witness;
    canonical_sign(c.witness);
    c.notes.push_back("both endpoint forms are negative along the witness, so no multiplier on the segment satisfies "
                      "WSOC and the direction-wise condition fails along it");
    c.lambda_min = c.yuan.lambda_min;
    return c;
  }

  const double alpha = c.yuan.alpha, beta = 1.0 - alpha;
  c.eta = alpha * c.a_star + beta * c.b_star;
  c.mu_hat = axpy(alpha, c.nu_a, scaled(beta, c.nu_b));
  for (double& x : c.mu_hat)
    if (std::abs(x) < 1e-15) x = 0.0;
  const PsdVerdict check = wsoc_check(restrict_form(basis, lagrangian_hessian(a, c.mu_hat)), eps_psd);
  c.lambda_min = check.lambda_min;
  c.threshold = check.threshold;
  if (c.yuan.kind == YuanResult::Kind::Combined && check.holds && p.contains(c.mu_hat)) {
    c.verdict = ConjectureCertificate::Verdict::Certified;
  } else {
    c.verdict = ConjectureCertificate::Verdict::Inconclusive;
    if (!c.yuan.diagnostics.empty()) c.notes.push_back(c.yuan.diagnostics);
    if (c.yuan.kind == YuanResult::Kind::Combined) c.notes.push_back("recomputed multiplier failed verification");
  }
  return c;
}

ContinuityReport svd_continuity_probe(const NlpProblem& p, const StationaryPointAnalysis& a, double radius,
                                      std::size_t rays, std::uint64_t seed) {
  ContinuityReport rep;
  for (std::size_t k = 0; k < rays; ++k) {
    Rng rng(seed, kRayStream + k);
    const Vector w = rng.unit_vector(a.dim());
    const auto lim = ray_limit(p, a, w, radius);
    if (!lim) {
      ++rep.degenerate_rays;
      continue;
    }
    Vector u = lim->u, v = lim->v;
    first_nonzero_positive(u);
    first_nonzero_positive(v);
    rep.u_limits.push_back(u);
    rep.v_limits.push_back(v);
  }
  rep.rays_used = rep.u_limits.size();
  if (rep.rays_used == 0) throw ConjectureError("no activating direction: every ray is degenerate");
  rep.u_angle = max_pairwise_angle(rep.u_limits);
  rep.v_angle = max_pairwise_angle(rep.v_limits);
  rep.u_flag = rep.u_angle > kContinuityFlagAngle;
  rep.v_flag = rep.v_angle > kContinuityFlagAngle;
  return rep;
}

}  // namespace socert
