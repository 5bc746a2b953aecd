// Acceptance checks: one PASS/FAIL line per criterion.

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "socert/conjecture.hpp"
#include "socert/random.hpp"
#include "socert/report.hpp"

using namespace socert;

namespace {

NlpProblem gallery(const std::string& id) { return load_problem(gallery_dir() / (id + ".nlp")); }

double lambda_min_on(const StationaryPointAnalysis& a, const Vector& nu) {
  return wsoc_check(restrict_form(a.critical_basis, lagrangian_hessian(a, nu))).lambda_min;
}

Matrix random_symmetric(std::size_t n, Rng& rng) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) m(i, j) = m(j, i) = rng.normal();
  return m;
}

// Each criterion returns "" on success or the reason for failure.
using Criterion = std::function<std::string()>;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string minchenko() {
  const NlpProblem p = gallery("minchenko");
  const StationaryPointAnalysis a = analyze_point(p);
  const double l1 = lambda_min_on(a, {1, 0, 0}), l2 = lambda_min_on(a, {0, 1, 0});
  if (std::abs(l1 - 2.0) > 1e-9) return fmt("lambda_min at e1 = %.12g", l1);
  if (std::abs(l2 + 4.0) > 1e-9) return fmt("lambda_min at e2 = %.12g", l2);
  const Analysis r = analyze(p);
  if (r.exit_code != 0) return "exit code " + std::to_string(r.exit_code);
  if (r.report["critical_subspace_dim"] != 1) return "critical subspace is not one-dimensional";
  if (r.report["certificate"]["verdict"] != "certified") return "certificate did not certify";
  return "";
}

std::string arutyunov() {
  const NlpProblem p = gallery("arutyunov");
  const StationaryPointAnalysis a = analyze_point(p);
  if (!check_mfcq(a).holds) return "MFCQ does not hold";
  const MultiplierPolytope poly = lagrange_polytope(a);
  const std::vector<Vector> expect{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  if (poly.vertices.size() != expect.size()) return std::to_string(poly.vertices.size()) + " vertices";
  for (std::size_t k = 0; k < expect.size(); ++k)
    if (norm_inf(axpy(-1.0, poly.vertices[k], expect[k])) > 1e-12) return "vertices differ from the unit vectors";
  for (const Vector& v : poly.vertices)
    if (poly.residual(v) > 1e-8) return "vertex residual too large";
  double best = -1e300, worst_trace = 0.0;
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; i + j <= 100; ++j) {
      const Vector mu{i / 100.0, j / 100.0, (100 - i - j) / 100.0};
      const Matrix m = congruence(a.critical_basis, lagrangian_hessian(a, mu));
      best = std::max(best, sym_eigen(m).values[0]);
      worst_trace = std::max(worst_trace, std::abs(m(0, 0) + m(1, 1) + 4.0));
    }
  if (best > -2.0 + 1e-8) return fmt("grid max of lambda_min = %.12g", best);
  if (worst_trace > 1e-10) return fmt("trace deviation %.3g", worst_trace);
  const DirectionwiseResult d = directionwise_necessary(poly, a, a.critical_basis, sample_directions(2, 720, 42));
  if (d.directions != 720 || d.worst_value < -1e-9) return fmt("directionwise worst = %.12g", d.worst_value);
  const Analysis r = analyze(p);
  if (r.exit_code != 2) return "exit code " + std::to_string(r.exit_code);
  return "";
}

std::string cosine() {
  const NlpProblem p = gallery("cosine-svd");
  const StationaryPointAnalysis a = analyze_point(p);
  const OracleValidation v = svd_oracle_validate(p, a, 1e-2, 50, 1e-4, 42);
  if (!v.passed) return "oracle validation failed: " + (v.failures.empty() ? std::string() : v.failures[0]);
  if (v.max_reconstruction > 1e-9) return fmt("reconstruction %.3g", v.max_reconstruction);
  const MultiplierPolytope poly = lagrange_polytope(a);
  const ActivatingDirection u = activating_direction(p, a, 1e-2, 16, 42);
  const ConjectureCertificate c = conjecture_certificate(a, poly, u.u, a.critical_basis);
  if (c.verdict != ConjectureCertificate::Verdict::Certified) return "certificate did not certify";
  if (c.mu_hat[1] - c.mu_hat[0] < -1e-9) return "mu_hat has mu2 < mu1";
  if (c.lambda_min < -1e-9) return fmt("certificate lambda_min = %.12g", c.lambda_min);
  for (int k = 0; k <= 200; ++k) {
    const double t = k / 200.0;
    const Vector mu{t, 1 - t, 0};
    const double l = lambda_min_on(a, mu);
    const bool psd = l >= -1e-9, expected = mu[1] >= mu[0];
    if (psd != expected) return fmt("region check fails at mu1 = %.4f", t);
    if (k == 100 && std::abs(l) > 1e-9) return fmt("boundary lambda_min = %.3g", l);
  }
  return "";
}

std::string bilinear() {
  const NlpProblem p = gallery("bilinear-x1x2");
  const StationaryPointAnalysis a = analyze_point(p);
  const ContinuityReport r = svd_continuity_probe(p, a, 1e-2, 16, 42);
  if (r.v_angle < 0.5) return fmt("V-side angle %.4g", r.v_angle);
  if (r.u_angle > 1e-3) return fmt("U-side angle %.4g", r.u_angle);
  const ActivatingDirection u = activating_direction(p, a, 1e-2, 16, 42);
  const ConjectureCertificate c = conjecture_certificate(a, lagrange_polytope(a), u.u, a.critical_basis);
  if (c.verdict != ConjectureCertificate::Verdict::Certified) return "certificate did not certify";
  if (c.lambda_min < -1e-9) return fmt("lambda_min = %.12g", c.lambda_min);
  return "";
}

std::string pairwise_ranks() { return check_pairwise_ranks(gallery("rank-lemma-counterexample"), 50, 42); }

std::string constant_rank() {
  const NlpProblem p = gallery("parabola-duplicated");
  const StationaryPointAnalysis a = analyze_point(p);
  const RankProbeReport probe = rank_probe(p, a, 1e-2, 200, 42);
  if (probe.base_rank != 1 || probe.max_rank != 1) return "rank probe saw a rank change";
  const MultiplierPolytope poly = lagrange_polytope(a);
  const DeviationReport d = constant_rank_independence(poly, a, a.critical_basis, probe, 100, 42);
  if (d.declined) return "constant-rank check declined: " + d.reason;
  if (d.pairs != 100 || d.max_deviation > 1e-10) return fmt("deviation %.3g", d.max_deviation);
  for (const Vector& v : poly.vertices)
    if (!wsoc_check(restrict_form(a.critical_basis, lagrangian_hessian(a, v))).holds) return "a vertex fails WSOC";
  return "";
}

std::string yuan_suite() {
  std::size_t inconclusive = 0;
  auto judge = [&](const Matrix& p, const Matrix& q, bool hypothesis) -> std::string {
    const YuanResult y = yuan_combine(p, q);
    if (y.kind == YuanResult::Kind::Combined) {
      const Matrix m = y.alpha * p + y.beta * q;
      if (std::abs(y.alpha + y.beta - 1.0) > 1e-12) return "alpha + beta != 1";
      if (sym_eigen(m).values[0] < -1e-8 * (1 + m.frobenius())) return "combined verdict is not PSD";
    } else if (y.kind == YuanResult::Kind::Refuted) {
      if (hypothesis) return "refuted a pair that satisfies the hypothesis";
      if (std::max(quad_form(p, y.witness), quad_form(q, y.witness)) >= 0) return "refutation witness is invalid";
    } else if (hypothesis) {
      ++inconclusive;
    }
    return "";
  };
  for (std::size_t k = 0; k < 1000; ++k) {
    Rng rng(7001, k);
    const std::size_t s = 1 + k % 6;
    const std::string e = judge(random_symmetric(s, rng), random_symmetric(s, rng), false);
    if (!e.empty()) return e + " (random pair " + std::to_string(k) + ")";
  }
  for (std::size_t k = 0; k < 500; ++k) {
    Rng rng(7002, k);
    const std::size_t s = 1 + k % 6;
    const Matrix p = random_symmetric(s, rng);
    Matrix q;
    if (k % 2 == 0) {
      Vector v(s);
      for (double& x : v) x = rng.normal();
      Matrix vv(s, s);
      for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) vv(i, j) = v[i] * v[j];
      q = -1.0 * p + rng.uniform(0.1, 2.0) * vv;
    } else {
      const Matrix g = random_symmetric(s, rng);
      q = -1.0 * p + g * g;
    }
    const std::string e = judge(p, q, true);
    if (!e.empty()) return e + " (constructed pair " + std::to_string(k) + ")";
  }
  if (inconclusive != 0) return std::to_string(inconclusive) + " inconclusive on constructed pairs";
  return "";
}

std::string derivatives() {
  for (const auto& id : gallery_ids())
    for (const DerivativeCheck& d : check_derivatives(gallery(id))) {
      if (!d.error.empty()) return id + "/" + d.function + ": " + d.error;
      if (d.worst > 1e-5) return id + "/" + d.function + fmt(": %.3g", d.worst);
    }
  return "";
}

std::string lp_cross_validation() {
  for (const auto& id : gallery_ids()) {
    const MultiplierPolytope poly = lagrange_polytope(analyze_point(gallery(id)));
    if (poly.empty || !poly.enumerated) return id + ": polytope not enumerated";
    for (std::size_t k = 0; k < 100; ++k) {
      Rng rng(9001, k);
      Vector c(poly.dim());
      for (double& x : c) x = rng.normal();
      double best = -1e300;
      for (const Vector& v : poly.vertices) best = std::max(best, dot(c, v));
      const LpResult r = lp_solve(poly.lp(c));
      if (r.status != LpStatus::Optimal) return id + ": LP not optimal";
      if (std::abs(r.value - best) > 1e-8) return id + fmt(": LP differs by %.3g", std::abs(r.value - best));
    }
  }
  return "";
}

std::string run_cli(const std::string& args) {
  const std::string cmd = std::string(SOCERT_CLI) + " " + args + " 2>/dev/null";
  std::FILE* f = popen(cmd.c_str(), "r");
  if (!f) return "";
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
  pclose(f);
  return out;
}

std::string determinism() {
  for (const auto& id : gallery_ids()) {
    const std::string args = "analyze \"" + (gallery_dir() / (id + ".nlp")).string() + "\" --json --seed 42";
    const std::string a = run_cli(args), b = run_cli(args);
    if (a.empty()) return id + ": no output";
    if (a != b) return id + ": outputs differ";
  }
  return "";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Criterion>> criteria{
      {"minchenko WSOC values and dim-1 certificate", minchenko},
      {"arutyunov multipliers, grid and directionwise bound", arutyunov},
      {"cosine oracle, certificate and WSOC region", cosine},
      {"bilinear SVD discontinuity and certificate", bilinear},
      {"pairwise gradient ranks near the origin", pairwise_ranks},
      {"parabola constant rank independence", constant_rank},
      {"Yuan combiner property suite", yuan_suite},
      {"gallery derivative check", derivatives},
      {"LP versus vertex enumeration", lp_cross_validation},
      {"byte-identical CLI output", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string why;
    try {
      why = criteria[i].second();
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    if (why.empty()) {
      std::printf("PASS %2zu %s\n", i + 1, criteria[i].first);
    } else {
      ++failures;
      std::printf("FAIL %2zu %s: %s\n", i + 1, criteria[i].first, why.c_str());
    }
  }
  return failures == 0 ? 0 : 1;
}
