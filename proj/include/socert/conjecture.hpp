#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "socert/linalg.hpp"
#include "socert/model.hpp"
#include "socert/multipliers.hpp"
#include "socert/secondorder.hpp"

namespace socert {

class ConjectureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RankProbeReport {
  std::size_t base_rank = 0;
  double radius = 0.0;
  std::size_t samples = 0;
  std::size_t skipped = 0;  // samples hitting a domain error
  std::map<std::size_t, std::size_t> histogram;
  std::size_t max_rank = 0;
  // σ_{r+1} over the evaluated samples (absent when r+1 exceeds min(rows, n)).
  std::optional<double> sigma_min, sigma_median, sigma_max;
};

// J(x) on the active rows of x*, at points uniform in the ball of the given
// radius around x*. Sample k uses Rng(seed, k).
RankProbeReport rank_probe(const NlpProblem& p, const StationaryPointAnalysis& a, double radius, std::size_t samples,
                           std::uint64_t seed);

struct ActivatingDirection {
  Vector u;                       // unit, in Ker(J(x*)ᵀ), first nonzero entry positive
  std::string source;             // "oracle" or "numeric"
  std::vector<Vector> estimates;  // per-ray limits (numeric path)
  Matrix angles;                  // pairwise line angles between estimates
  bool consistent = false;
  std::size_t degenerate_rays = 0;
  std::optional<double> cross_check_angle;  // oracle vs numeric estimate
};

ActivatingDirection activating_direction(const NlpProblem& p, const StationaryPointAnalysis& a, double radius,
                                         std::size_t rays, std::uint64_t seed);

struct OracleValidation {
  bool passed = false;
  std::size_t points = 0;
  double max_reconstruction = 0.0;
  std::vector<std::string> failures;
};

OracleValidation svd_oracle_validate(const NlpProblem& p, const StationaryPointAnalysis& a, double radius,
                                     std::size_t samples, double fd_step, std::uint64_t seed);

struct DeviationReport {
  bool vacuous = false;   // one-parameter check: Ker(Jᵀ) has dim <= 1 or Λ is a point
  bool declined = false;  // constant-rank check: precondition unmet
  std::string reason;
  std::size_t pairs = 0;
  double max_deviation = 0.0;
};

// Pairs ν, ν' in Λ with τ(ν) = τ(ν'); max of ‖Bᵀ(H(ν) - H(ν'))B‖_max.
DeviationReport one_parameter_check(const MultiplierPolytope& p, const StationaryPointAnalysis& a, const Matrix& basis,
                                    std::span<const double> u, std::size_t trials, std::uint64_t seed);

// Random pairs in Λ; declines unless the probe saw constant rank.
DeviationReport constant_rank_independence(const MultiplierPolytope& p, const StationaryPointAnalysis& a,
                                           const Matrix& basis, const RankProbeReport& probe, std::size_t trials,
                                           std::uint64_t seed);

struct ConjectureCertificate {
  enum class Verdict { Certified, HypothesisRefuted, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  Vector mu_bar;
  Vector u;
  double a_star = 0.0, b_star = 0.0;
  Vector nu_a, nu_b;
  Matrix p_form, q_form;
  YuanResult yuan;
  double eta = 0.0;
  Vector mu_hat;
  double lambda_min = 0.0;
  double threshold = 0.0;
  Vector witness;  // ambient direction when refuted
  std::vector<std::string> notes;
};

const char* to_string(ConjectureCertificate::Verdict v);

// The basis is normally the critical subspace; span(C(x*)) under GSCS gives
// the SSOC variant.
ConjectureCertificate conjecture_certificate(const StationaryPointAnalysis& a, const MultiplierPolytope& p,
                                             std::span<const double> u, const Matrix& basis,
                                             double eps_psd = kDefaultPsdTol);

struct ContinuityReport {
  std::size_t rays_used = 0;
  std::size_t degenerate_rays = 0;
  std::vector<Vector> u_limits, v_limits;
  double u_angle = 0.0;
  double v_angle = 0.0;
  bool u_flag = false;
  bool v_flag = false;
};

constexpr double kContinuityFlagAngle = 0.1;

ContinuityReport svd_continuity_probe(const NlpProblem& p, const StationaryPointAnalysis& a, double radius,
                                      std::size_t rays, std::uint64_t seed);

// Angle between the lines spanned by two vectors.
double line_angle(std::span<const double> a, std::span<const double> b);

}  // namespace socert
