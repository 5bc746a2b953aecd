#include "socert/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <fstream>
#include <sstream>

#include "socert/conjecture.hpp"
#include "socert/multipliers.hpp"
#include "socert/random.hpp"
#include "socert/secondorder.hpp"

namespace socert {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxListedVertices = 20;

double clean(double v) { return std::abs(v) < 1e-14 ? 0.0 : v; }

json num(double v) {
  if (std::isfinite(v)) return clean(v);
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

json vec(std::span<const double> v) {
  json out = json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

json mat(const Matrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(vec(m.row(r)));
  return out;
}

// ν = (λ, μ_A) as {"lambda": λ, "mu": μ over all inequalities}.
json multiplier(const NlpProblem& p, const StationaryPointAnalysis& a, std::span<const double> nu) {
  Vector lambda(nu.begin(), nu.begin() + static_cast<std::ptrdiff_t>(a.num_equalities));
  Vector mu(p.inequalities.size(), 0.0);
  for (std::size_t k = 0; k < a.active.size(); ++k) mu[a.active[k]] = nu[a.num_equalities + k];
  return {{"lambda", vec(lambda)}, {"mu", vec(mu)}};
}

struct DirectionChoice {
  Vector u;
  std::string source;
};

// û for the certificate. Two cases need no rank-increase information: with
// dim S = 1 every restricted form is the scalar c·ν, c_r = d₀ᵀ∇²(row r)d₀,
// so the component of c in Ker(Jᵀ) orders Λ by WSOC value; with
// dim Ker(Jᵀ) = 1 the kernel vector is the only candidate.
std::optional<DirectionChoice> choose_direction(const StationaryPointAnalysis& a, const Matrix& kernel,
                                                const std::optional<ActivatingDirection>& act) {
  if (kernel.cols() == 0) return std::nullopt;
  DirectionChoice ch;
  if (a.subspace_dim() == 1) {
    const Vector d0 = a.critical_basis.col(0);
    const FormCoefficients fc = form_coefficients(a, d0);
    Vector proj(a.rows(), 0.0);
    for (std::size_t c = 0; c < kernel.cols(); ++c) {
      const Vector k = kernel.col(c);
      proj = axpy(dot(k, fc.coef), k, proj);
    }
    if (norm2(proj) > 1e-10 * (1.0 + norm2(fc.coef))) {
      ch.u = normalized(proj);
      ch.source = "form-gradient";
    } else {
      ch.u = kernel.col(0);
      ch.source = "kernel";
    }
  } else if (kernel.cols() == 1) {
    ch.u = kernel.col(0);
    ch.source = "kernel";
  } else if (act) {
    ch.u = act->u;
    ch.source = act->source;
  } else {
    return std::nullopt;
  }
  first_nonzero_positive(ch.u);
  return ch;
}

json certificate_json(const NlpProblem& p, const StationaryPointAnalysis& a, const ConjectureCertificate& c) {
  json j;
  j["verdict"] = to_string(c.verdict);
  j["u"] = vec(c.u);
  j["mu_bar"] = multiplier(p, a, c.mu_bar);
  j["a_star"] = num(c.a_star);
  j["b_star"] = num(c.b_star);
  j["nu_a"] = multiplier(p, a, c.nu_a);
  j["nu_b"] = multiplier(p, a, c.nu_b);
  j["yuan"] = {{"kind", to_string(c.yuan.kind)}, {"alpha", num(c.yuan.alpha)}, {"beta", num(1.0 - c.yuan.alpha)}};
  if (c.verdict == ConjectureCertificate::Verdict::HypothesisRefuted) {
    j["witness"] = vec(c.witness);
    j["lambda_min"] = num(c.lambda_min);
  } else {
    j["eta"] = num(c.eta);
    j["mu_hat"] = multiplier(p, a, c.mu_hat);
    j["lambda_min"] = num(c.lambda_min);
    j["threshold"] = num(c.threshold);
  }
  j["p_form"] = mat(c.p_form);
  j["q_form"] = mat(c.q_form);
  if (!c.notes.empty()) j["notes"] = c.notes;
  return j;
}

}  // namespace

Analysis analyze(const NlpProblem& p, const AnalyzeOptions& opts) {
  Analysis out;
  json& r = out.report;
  json errors = json::object();
  auto stage = [&](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      errors[name] = e.what();
    }
  };

  const Tolerances rank_tol{opts.tol_rank, 1e-12};
  const StationaryPointAnalysis a = analyze_point(p, opts.tol_active, rank_tol);
  const Matrix& basis = a.critical_basis;

  r["problem"] = p.name;
  r["tool_version"] = kToolVersion;
  r["seed"] = opts.seed;
  r["tolerances"] = {{"active", num(opts.tol_active)},   {"rank_rel", num(rank_tol.rel)},
                     {"rank_abs", num(rank_tol.abs)},     {"psd", num(opts.tol_psd)},
                     {"feasibility", num(kFeasibilityTol)}, {"radius", num(opts.radius)},
                     {"samples", opts.samples},           {"rays", opts.rays},
                     {"directions", opts.directions},     {"trials", opts.trials},
                     {"max_iter", opts.max_iter}};
  r["point"] = vec(a.x);
  r["feasibility"] = {{"residual", num(a.feasibility_residual)}};
  {
    json act = json::array(), names = json::array();
    for (std::size_t j : a.active) {
      act.push_back(j + 1);
      names.push_back(p.inequalities[j].name);
    }
    r["active_set"] = {{"indices", act}, {"names", names}};
  }
  r["rank"] = a.rank;
  r["critical_subspace_dim"] = a.subspace_dim();

  MfcqReport mfcq;
  stage("mfcq", [&] {
    mfcq = check_mfcq(a);
    r["mfcq"] = {{"holds", mfcq.holds}, {"equality_independent", mfcq.equality_independent}, {"margin", num(mfcq.margin)}};
    if (mfcq.direction) r["mfcq"]["direction"] = vec(*mfcq.direction);
  });

  std::optional<MultiplierPolytope> poly;
  stage("multipliers", [&] {
    poly = lagrange_polytope(a);
    json m = {{"empty", poly->empty},
              {"bounded", poly->bounded},
              {"dimension", poly->dim()},
              {"enumerated", poly->enumerated},
              {"vertex_count", poly->vertices.size()}};
    json vs = json::array();
    for (std::size_t k = 0; k < poly->vertices.size() && k < kMaxListedVertices; ++k)
      vs.push_back(multiplier(p, a, poly->vertices[k]));
    m["vertices"] = vs;
    r["multipliers"] = m;
  });

  std::optional<FritzJohnPolytope> fj;
  stage("fritz_john", [&] {
    fj = fritz_john_polytope(a);
    r["fritz_john"] = {{"empty", fj->empty}};
    if (const auto l0 = min_lambda0(*fj)) r["fritz_john"]["min_lambda0"] = num(*l0);
  });

  const bool usable = poly && !poly->empty;
  std::optional<GscsResult> gscs;
  if (usable) {
    stage("gscs", [&] {
      gscs = gscs_check(*poly);
      json z = json::array();
      for (std::size_t j : gscs->zero_indices) z.push_back(a.active[j] + 1);
      r["gscs"] = {{"holds", gscs->holds}, {"zero_indices", z}};
      if (gscs->i_star) r["gscs"]["i_star"] = a.active[*gscs->i_star] + 1;
    });

    stage("wsoc_vertices", [&] {
      json rows = json::array();
      for (std::size_t k = 0; k < poly->vertices.size() && k < kMaxListedVertices; ++k) {
        const PsdVerdict v = wsoc_check(restrict_form(basis, lagrangian_hessian(a, poly->vertices[k])), opts.tol_psd);
        rows.push_back({{"multiplier", multiplier(p, a, poly->vertices[k])},
                        {"lambda_min", num(v.lambda_min)},
                        {"holds", v.holds}});
      }
      r["wsoc_vertices"] = rows;
    });

    stage("directionwise", [&] {
      const auto dirs = sample_directions(basis.cols(), opts.directions, opts.seed);
      const DirectionwiseResult d = directionwise_necessary(*poly, a, basis, dirs);
      json j = {{"directions", d.directions},
                {"worst_value", num(d.worst_value)},
                {"note", "sampled evidence for the direction-wise condition, not a proof"}};
      if (!d.worst_direction.empty()) {
        j["worst_direction"] = vec(d.worst_direction);
        if (!d.worst_multiplier.empty() || poly->dim() == 0) j["worst_multiplier"] = multiplier(p, a, d.worst_multiplier);
        if (fj && !fj->empty) {
          const FjDirectionResult f = fritz_john_directionwise(*fj, a, d.worst_direction);
          j["fritz_john_value"] = num(f.value);
          j["fritz_john_point"] = vec(f.point);
        }
      }
      r["directionwise"] = j;
    });
  }

  std::optional<RankProbeReport> probe;
  stage("rank_probe", [&] {
    probe = rank_probe(p, a, opts.radius, opts.samples, opts.seed);
    json h = json::object();
    for (const auto& [rank, count] : probe->histogram) h[std::to_string(rank)] = count;
    json j = {{"base_rank", probe->base_rank}, {"radius", num(probe->radius)}, {"samples", probe->samples},
              {"skipped", probe->skipped},     {"histogram", h},                {"max_rank", probe->max_rank}};
    if (probe->sigma_min)
      j["sigma_next"] = {{"min", num(*probe->sigma_min)},
                         {"median", num(*probe->sigma_median)},
                         {"max", num(*probe->sigma_max)}};
    r["rank_probe"] = j;
  });

  const Matrix kernel = a.rows() == 0 ? Matrix() : nullspace(a.jacobian.transpose(), rank_tol);
  const bool rank_increases = probe && probe->max_rank > probe->base_rank;
  std::optional<ActivatingDirection> act;
  if (kernel.cols() > 0 && (rank_increases || p.oracle)) {
    stage("activating_direction", [&] {
      act = activating_direction(p, a, opts.radius, opts.rays, opts.seed);
      json j = {{"source", act->source},
                {"u", vec(act->u)},
                {"consistent", act->consistent},
                {"rays_used", act->estimates.size()},
                {"degenerate_rays", act->degenerate_rays}};
      if (act->estimates.size() > 1) j["max_angle"] = num(act->angles.max_abs());
      if (act->cross_check_angle) j["cross_check_angle"] = num(*act->cross_check_angle);
      r["activating_direction"] = j;
    });
    if (rank_increases)
      stage("svd_continuity", [&] {
        const ContinuityReport c = svd_continuity_probe(p, a, opts.radius, opts.rays, opts.seed);
        r["svd_continuity"] = {{"rays_used", c.rays_used}, {"degenerate_rays", c.degenerate_rays},
                               {"u_angle", num(c.u_angle)}, {"v_angle", num(c.v_angle)},
                               {"u_flag", c.u_flag},        {"v_flag", c.v_flag}};
      });
  }

  if (p.oracle)
    stage("svd_oracle", [&] {
      const OracleValidation v = svd_oracle_validate(p, a, opts.radius, 50, 1e-4, opts.seed);
      r["svd_oracle"] = {{"passed", v.passed},
                         {"points", v.points},
                         {"max_reconstruction", num(v.max_reconstruction)},
                         {"failures", v.failures}};
    });

  std::optional<DirectionChoice> choice;
  if (usable) choice = choose_direction(a, kernel, act);

  if (usable && choice)
    stage("one_parameter", [&] {
      const DeviationReport d = one_parameter_check(*poly, a, basis, choice->u, opts.trials, opts.seed);
      r["one_parameter"] = {{"vacuous", d.vacuous}, {"pairs", d.pairs}, {"max_deviation", num(d.max_deviation)}};
      if (!d.reason.empty()) r["one_parameter"]["reason"] = d.reason;
    });

  if (usable && probe)
    stage("constant_rank", [&] {
      const DeviationReport d = constant_rank_independence(*poly, a, basis, *probe, opts.trials, opts.seed);
      r["constant_rank"] = {{"declined", d.declined}, {"pairs", d.pairs}, {"max_deviation", num(d.max_deviation)}};
      if (!d.reason.empty()) r["constant_rank"]["reason"] = d.reason;
    });

  std::optional<ConjectureCertificate> cert;
  if (usable) {
    stage("certificate", [&] {
      if (!mfcq.holds) throw ConjectureError("precondition: MFCQ does not hold");
      if (!choice) {
        if (kernel.cols() == 0) throw ConjectureError("Λ(x*) is a single point; the search decides WSOC directly");
        throw ConjectureError("no activating direction available");
      }
      cert = conjecture_certificate(a, *poly, choice->u, basis, opts.tol_psd);
      json j = certificate_json(p, a, *cert);
      j["u_source"] = choice->source;
      if (probe && probe->max_rank > probe->base_rank + 1) j["hypothesis"] = "hypothesis violated (rank exceeds r+1)";
      r["certificate"] = j;
    });
  }

  const bool certified = cert && cert->verdict == ConjectureCertificate::Verdict::Certified;
  std::optional<WsocSearchResult> search;
  if (usable && !certified)
    stage("wsoc_search", [&] {
      search = find_wsoc_multiplier(*poly, a, basis, opts.max_iter, opts.tol_psd);
      r["wsoc_search"] = {{"found", search->found},
                          {"multiplier", multiplier(p, a, search->multiplier)},
                          {"lambda_min", num(search->lambda_min)},
                          {"iterations", search->iterations}};
    });

  if (usable && gscs && gscs->holds)
    stage("ssoc", [&] {
      const auto cone = gscs_cone(a, *poly, *gscs);
      const Matrix span = cone->span_basis();
      json j = {{"lineality_dim", cone->lineality.cols()}};
      if (cone->ray) j["ray"] = vec(*cone->ray);
      Vector nu;
      if (choice && mfcq.holds) {
        const ConjectureCertificate c = conjecture_certificate(a, *poly, choice->u, span, opts.tol_psd);
        j["certificate_verdict"] = to_string(c.verdict);
        nu = c.verdict == ConjectureCertificate::Verdict::HypothesisRefuted ? c.nu_b : c.mu_hat;
      } else {
        nu = find_wsoc_multiplier(*poly, a, span, opts.max_iter, opts.tol_psd).multiplier;
      }
      const PsdVerdict v = ssoc_first_order_check(lagrangian_hessian(a, nu), *cone, opts.tol_psd);
      j["multiplier"] = multiplier(p, a, nu);
      j["holds"] = v.holds;
      j["lambda_min"] = num(v.lambda_min);
      j["note"] = "checked on the span of the first-order cone; quadratic forms are even, so this is exact";
      r["ssoc"] = j;
    });

  std::string verdict;
  if (!poly) {
    verdict = "inconclusive";
    out.exit_code = kExitInconclusive;
  } else if (poly->empty) {
    verdict = "no-multiplier";
    out.exit_code = kExitRefuted;
  } else if (certified) {
    verdict = "certified";
    out.exit_code = kExitCertified;
  } else if (search && search->found) {
    verdict = "wsoc-multiplier-found";
    out.exit_code = kExitCertified;
  } else if (cert && cert->verdict == ConjectureCertificate::Verdict::Inconclusive) {
    verdict = "inconclusive";
    out.exit_code = kExitInconclusive;
  } else if (search || (cert && cert->verdict == ConjectureCertificate::Verdict::HypothesisRefuted)) {
    verdict = "wsoc-fails";
    out.exit_code = kExitRefuted;
  } else {
    verdict = "inconclusive";
    out.exit_code = kExitInconclusive;
  }
  r["verdict"] = verdict;
  r["exit_code"] = out.exit_code;
  r["stage_errors"] = errors;
  return out;
}

namespace {

void write_json(std::ostringstream& os, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << inner << json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent + 1);
      }
      os << "\n" << pad << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      if (flat) {
        os << "[";
        for (std::size_t k = 0; k < j.size(); ++k) {
          if (k) os << ", ";
          write_json(os, j[k], indent + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) os << ",\n";
        os << inner;
        write_json(os, j[k], indent + 1);
      }
      os << "\n" << pad << "]";
      return;
    }
    case json::value_t::number_float: {
      double v = j.get<double>();
      if (!std::isfinite(v)) {
        os << num(v).dump();
        return;
      }
      if (v == 0.0) v = 0.0;
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12e", v);
      os << buf;
      return;
    }
    default:
      os << j.dump();
  }
}

void write_text(std::ostringstream& os, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  auto scalar = [](const json& v) {
    if (v.is_string()) return v.get<std::string>();
    std::ostringstream s;
    write_json(s, v, 0);
    return s.str();
  };
  auto simple = [](const json& v) {
    return v.is_primitive() || (v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_primitive(); }));
  };
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (simple(it.value())) {
        os << pad << it.key() << ": " << scalar(it.value()) << "\n";
      } else if (it.value().empty()) {
        os << pad << it.key() << ": (none)\n";
      } else {
        os << pad << it.key() << ":\n";
        write_text(os, it.value(), indent + 1);
      }
    }
  } else if (j.is_array()) {
    for (const json& e : j) {
      if (simple(e)) {
        os << pad << "- " << scalar(e) << "\n";
      } else {
        os << pad << "-\n";
        write_text(os, e, indent + 1);
      }
    }
  } else {
    os << pad << scalar(j) << "\n";
  }
}

}  // namespace

std::string canonical_json(const json& j) {
  std::ostringstream os;
  write_json(os, j, 0);
  os << "\n";
  return os.str();
}

std::string render_text(const json& j) {
  std::ostringstream os;
  write_text(os, j, 0);
  return os.str();
}

std::string first_difference(const json& a, const json& b) {
  std::function<std::string(const json&, const json&, const std::string&)> walk =
      [&](const json& x, const json& y, const std::string& path) -> std::string {
    if (x.type() != y.type() && !(x.is_number() && y.is_number())) return path.empty() ? "/" : path;
    if (x.is_object()) {
      for (auto it = x.begin(); it != x.end(); ++it) {
        if (!y.contains(it.key())) return path + "/" + it.key();
        const std::string d = walk(it.value(), y.at(it.key()), path + "/" + it.key());
        if (!d.empty()) return d;
      }
      for (auto it = y.begin(); it != y.end(); ++it)
        if (!x.contains(it.key())) return path + "/" + it.key();
      return "";
    }
    if (x.is_array()) {
      for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) {
        const std::string d = walk(x[k], y[k], path + "/" + std::to_string(k));
        if (!d.empty()) return d;
      }
      if (x.size() != y.size()) return path + "/" + std::to_string(std::min(x.size(), y.size()));
      return "";
    }
    return canonical_json(x) == canonical_json(y) ? "" : (path.empty() ? "/" : path);
  };
  return walk(a, b, "");
}

std::filesystem::path gallery_dir() {
  if (const char* env = std::getenv("SOCERT_GALLERY_DIR")) return env;
  return SOCERT_GALLERY_DIR;
}

std::vector<std::string> gallery_ids() {
  return {"arutyunov", "rank-lemma-counterexample", "minchenko", "cosine-svd", "bilinear-x1x2", "parabola-duplicated"};
}

std::string check_pairwise_ranks(const NlpProblem& p, std::size_t points, std::uint64_t seed) {
  const StationaryPointAnalysis a = analyze_point(p);
  if (a.rows() != 3) return "expected three active gradients, found " + std::to_string(a.rows());
  // σ₂/σ₁ of the pair (g2, g3) is O(ρ²), far below the default relative
  // tolerance at ρ = 1e-4, so this check uses a tighter one.
  const Tolerances tol{1e-12, 1e-14};
  for (std::size_t k = 0; k < points; ++k) {
    Rng rng(seed, k);
    const double rho = std::pow(10.0, rng.uniform(-4.0, -2.0));
    const Vector x = axpy(rho, rng.unit_vector(a.dim()), a.x);
    const Matrix j = active_jacobian(p, a, x);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t l = i + 1; l < 3; ++l) {
        const Matrix pair = Matrix::from_rows({j.row(i), j.row(l)});
        const std::size_t rk = svd(pair, tol).rank;
        if (rk != 2)
          return "gradients " + std::to_string(i + 1) + "," + std::to_string(l + 1) + " have rank " +
                 std::to_string(rk) + " at sample " + std::to_string(k + 1);
      }
    if (svd(j, tol).rank != 2) return "full gradient set does not have rank 2 at sample " + std::to_string(k + 1);
  }
  return "";
}

GalleryResult run_gallery_entry(const std::string& id, bool regenerate) {
  GalleryResult res{id, false, ""};
  const auto ids = gallery_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) throw DataError("unknown gallery entry '" + id + "'");
  const std::filesystem::path dir = gallery_dir();
  const NlpProblem p = load_problem(dir / (id + ".nlp"));
  const std::string text = canonical_json(analyze(p).report);
  const std::filesystem::path golden = dir / "golden" / (id + ".json");
  if (regenerate) {
    std::ofstream(golden, std::ios::binary) << text;
    res.passed = true;
    res.detail = "regenerated";
    return res;
  }
  std::ifstream in(golden, std::ios::binary);
  if (!in) {
    res.detail = "missing golden file " + golden.string();
    return res;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  if (ss.str() != text) {
    std::string where;
    try {
      where = first_difference(json::parse(ss.str()), json::parse(text));
    } catch (const std::exception&) {
      where = "(golden file is not valid JSON)";
    }
    res.detail = "differs from golden at " + (where.empty() ? std::string("(formatting)") : where);
    return res;
  }
  if (id == "rank-lemma-counterexample") {
    const std::string bad = check_pairwise_ranks(p, 50, 42);
    if (!bad.empty()) {
      res.detail = bad;
      return res;
    }
    res.detail = "all 2-subset ranks = 2";
  }
  res.passed = true;
  return res;
}

std::string surface_csv(const NlpProblem& p, const std::string& constraint, std::size_t grid, double lo, double hi) {
  if (p.arity() < 2) throw DataError("surface needs at least two variables");
  if (grid == 0) throw DataError("grid must be positive");
  const ScalarFunction* fn = nullptr;
  for (const auto* list : {&p.equalities, &p.inequalities})
    for (const auto& nf : *list)
      if (nf.name == constraint) fn = &nf.fn;
  if (!fn) throw DataError("unknown constraint '" + constraint + "'");

  // A constraint affine in x3 with nonzero slope defines a height x3(x1, x2).
  std::optional<double> slope;
  if (p.arity() >= 3) {
    const double c = fn->eval_jet(p.point).gradient()[2];
    bool affine = c != 0.0;
    for (std::size_t k = 0; affine && k < 8; ++k) {
      Rng rng(7, k);
      const Vector x = axpy(1.0, rng.in_ball(p.arity(), 1.0), p.point);
      try {
        const Taylor2 t = fn->eval_jet(x);
        if (std::abs(t.gradient()[2] - c) > 1e-12 * (1.0 + std::abs(c))) affine = false;
        for (std::size_t i = 0; i < p.arity(); ++i)
          if (t.hess(2, i) != 0.0) affine = false;
      } catch (const DomainError&) {
        affine = false;
      }
    }
    if (affine) slope = c;
  }

  std::ostringstream os;
  os << "x1,x2,value\n";
  auto coord = [&](std::size_t i) {
    return grid == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid - 1);
  };
  char buf[128];
  for (std::size_t i = 0; i < grid; ++i)
    for (std::size_t k = 0; k < grid; ++k) {
      Vector x = p.point;
      x[0] = coord(i);
      x[1] = coord(k);
      double v = fn->eval(x);
      if (slope) v = p.point[2] - v / *slope;
      if (v == 0.0) v = 0.0;
      std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e\n", x[0], x[1], v);
      os << buf;
    }
  return os.str();
}

std::vector<DerivativeCheck> check_derivatives(const NlpProblem& p, std::size_t points, double radius, double h,
                                               std::uint64_t seed) {
  std::vector<DerivativeCheck> out;
  auto run = [&](const std::string& name, const ScalarFunction& fn) {
    DerivativeCheck c{name, 0.0, ""};
    for (std::size_t k = 0; k <= points; ++k) {
      Vector x = p.point;
      if (k > 0) {
        Rng rng(seed, k);
        x = axpy(1.0, rng.in_ball(p.arity(), radius), p.point);
      }
      try {
        c.worst = std::max(c.worst, fd_check(fn, x, h));
      } catch (const DomainError& e) {
        c.error = e.what();
        break;
      }
    }
    out.push_back(c);
  };
  run("objective", p.objective);
  for (const auto& h_i : p.equalities) run(h_i.name, h_i.fn);
  for (const auto& g : p.inequalities) run(g.name, g.fn);
  return out;
}

}  // namespace socert
