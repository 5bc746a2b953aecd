#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "socert/model.hpp"

namespace socert {

inline constexpr const char* kToolVersion = "1.0.0";

struct AnalyzeOptions {
  double tol_active = 1e-8;
  double tol_rank = 1e-8;
  double tol_psd = 1e-8;
  double radius = 1e-2;
  std::size_t samples = 200;
  std::size_t rays = 16;
  std::size_t directions = 720;
  std::size_t trials = 100;
  int max_iter = 200;
  std::uint64_t seed = 42;
};

enum ExitCode : int { kExitCertified = 0, kExitUsage = 1, kExitRefuted = 2, kExitInconclusive = 3 };

struct Analysis {
  nlohmann::json report;
  int exit_code = kExitInconclusive;
};

// Runs every stage; stage failures are recorded under "stage_errors".
// Throws DataError when the point itself cannot be analyzed.
Analysis analyze(const NlpProblem& p, const AnalyzeOptions& opts = {});

// Sorted keys, two-space indent, doubles as %.12e, trailing newline.
std::string canonical_json(const nlohmann::json& j);
// Same tree as the JSON report, as indented "key: value" lines.
std::string render_text(const nlohmann::json& j);

// First JSON path at which two documents differ, or "" when equal.
std::string first_difference(const nlohmann::json& a, const nlohmann::json& b);

struct GalleryResult {
  std::string id;
  bool passed = false;
  std::string detail;
};

std::filesystem::path gallery_dir();
std::vector<std::string> gallery_ids();
GalleryResult run_gallery_entry(const std::string& id, bool regenerate = false);

// Every 2-subset of the three gradients has rank 2 at points near x* with
// 1e-4 <= ‖x - x*‖ <= 1e-2; returns a failure description or "".
std::string check_pairwise_ranks(const NlpProblem& p, std::size_t points, std::uint64_t seed);

std::string surface_csv(const NlpProblem& p, const std::string& constraint, std::size_t grid, double lo, double hi);

struct DerivativeCheck {
  std::string function;
  double worst = 0.0;
  std::string error;  // domain error, if any
};

std::vector<DerivativeCheck> check_derivatives(const NlpProblem& p, std::size_t points = 20, double radius = 0.1,
                                               double h = 1e-4, std::uint64_t seed = 42);

}  // namespace socert
