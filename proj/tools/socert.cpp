#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "socert/report.hpp"

using namespace socert;

namespace {

int cmd_analyze(const std::string& file, const AnalyzeOptions& opts, bool as_json) {
  const NlpProblem p = load_problem(file);
  const Analysis res = analyze(p, opts);
  std::cout << (as_json ? canonical_json(res.report) : render_text(res.report)) << std::flush;
  return res.exit_code;
}

int cmd_gallery(const std::string& name, bool regenerate) {
  std::vector<std::string> ids = gallery_ids();
  if (!name.empty()) {
    if (std::find(ids.begin(), ids.end(), name) == ids.end()) {
      std::cerr << "error: unknown gallery entry '" << name << "'; available:";
      for (const auto& id : ids) std::cerr << ' ' << id;
      std::cerr << "\n";
      return kExitUsage;
    }
    ids = {name};
  }
  std::size_t passed = 0;
  for (const auto& id : ids) {
    const GalleryResult r = run_gallery_entry(id, regenerate);
    std::printf("%-28s %s%s%s\n", id.c_str(), r.passed ? "PASS" : "FAIL", r.detail.empty() ? "" : "  ",
                r.detail.c_str());
    if (r.passed) ++passed;
  }
  std::printf("%zu/%zu pass\n", passed, ids.size());
  return passed == ids.size() ? 0 : kExitRefuted;
}

int cmd_check_derivatives(const std::string& file) {
  const NlpProblem p = load_problem(file);
  bool ok = true;
  for (const DerivativeCheck& c : check_derivatives(p)) {
    if (!c.error.empty()) {
      ok = false;
      std::printf("%-16s domain error: %s\n", c.function.c_str(), c.error.c_str());
      continue;
    }
    const bool pass = c.worst <= 1e-5;
    ok = ok && pass;
    std::printf("%-16s %.3e %s\n", c.function.c_str(), c.worst, pass ? "ok" : "FAIL");
  }
  return ok ? 0 : kExitRefuted;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order optimality certificates for nonlinear programs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  AnalyzeOptions opts;
  std::string file;
  bool as_json = false;
  auto* analyze_cmd = app.add_subcommand("analyze", "Analyze the candidate point of a problem file");
  analyze_cmd->add_option("file", file, "Problem file")->required();
  analyze_cmd->add_flag("--json", as_json, "Emit the canonical JSON report");
  analyze_cmd->add_option("--seed", opts.seed, "Sampling seed")->capture_default_str();
  analyze_cmd->add_option("--tol-active", opts.tol_active, "Active-set tolerance")->capture_default_str();
  analyze_cmd->add_option("--tol-rank", opts.tol_rank, "Relative rank tolerance")->capture_default_str();
  analyze_cmd->add_option("--tol-psd", opts.tol_psd, "PSD tolerance (scaled by 1+‖M‖_F)")->capture_default_str();
  analyze_cmd->add_option("--radius", opts.radius, "Neighborhood radius for probes")->capture_default_str();
  analyze_cmd->add_option("--samples", opts.samples, "Rank-probe samples")->capture_default_str();
  analyze_cmd->add_option("--rays", opts.rays, "Rays for activating-direction estimates")->capture_default_str();
  analyze_cmd->add_option("--directions", opts.directions, "Directions for the direction-wise test")
      ->capture_default_str();
  analyze_cmd->add_option("--max-iter", opts.max_iter, "Iterations of the WSOC multiplier search")
      ->capture_default_str();

  std::string gallery_name;
  bool regenerate = false;
  auto* gallery_cmd = app.add_subcommand("gallery", "Regenerate gallery reports and compare with golden files");
  gallery_cmd->add_option("--name", gallery_name, "Single gallery entry");
  gallery_cmd->add_flag("--regenerate", regenerate, "Rewrite the golden files");

  std::string constraint;
  std::size_t grid = 0;
  std::vector<double> range;
  auto* surface_cmd = app.add_subcommand("surface", "Dump a constraint surface on a grid as CSV");
  surface_cmd->add_option("file", file, "Problem file")->required();
  surface_cmd->add_option("--constraint", constraint, "Constraint name")->required();
  surface_cmd->add_option("--grid", grid, "Points per axis")->required()->check(CLI::PositiveNumber);
  surface_cmd->add_option("--range", range, "Axis range a b")->required()->expected(2);

  auto* deriv_cmd = app.add_subcommand("check-derivatives", "Compare exact derivatives with finite differences");
  deriv_cmd->add_option("file", file, "Problem file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(file, opts, as_json);
    if (*gallery_cmd) return cmd_gallery(gallery_name, regenerate);
    if (*surface_cmd) {
      std::cout << surface_csv(load_problem(file), constraint, grid, range[0], range[1]) << std::flush;
      return 0;
    }
    if (*deriv_cmd) return cmd_check_derivatives(file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
