#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "capwedge/comparison.hpp"
#include "capwedge/conditions.hpp"
#include "capwedge/config.hpp"
#include "capwedge/radial_limits.hpp"

namespace capwedge {

inline constexpr const char* kVersion = "0.1.0";

struct RunManifest {
  std::string id;
  std::string directory;
  nlohmann::json config;
  std::vector<std::string> artifacts;  // relative to directory
  std::map<std::string, std::string> versions;
  std::map<std::string, double> timings;  // seconds
  std::string status{"ok"};
  std::string error;
  int exit_code{0};
  std::uint64_t seed{0};

  nlohmann::json to_json() const;
};

enum class RunScope { Full, RadialOnly, SandwichOnly };

struct RunOptions {
  std::uint64_t seed{0};
  int threads{1};
  RunScope scope{RunScope::Full};
};

/// In-memory results of one solve pipeline.
struct SolveOutcome {
  std::optional<WedgeDomain> domain;
  std::optional<ConditionReport> conditions;
  bool outside_theorem{false};
  std::optional<ScalarField> field;
  std::optional<ScalarField> refined;
  std::optional<RadialProfile> profile;
  std::optional<LimitFit> z2;
  std::optional<Classification> classification;
  std::string classification_error;
  std::optional<SandwichReport> sandwich;
};

/// 0 success, 1 validation failure, 2 numerical failure.
int exit_code_for(ErrorCode code);

/// "<UTC timestamp>-<first 8 hex digits of the config hash>".
std::string make_run_id(const nlohmann::json& config);

/// Runs the pipeline and writes its artifacts into `directory` (created).
/// Module errors are caught, recorded in the manifest and mapped to an exit
/// code; the manifest is always written.
RunManifest run_solve(const ProblemConfig& config, const std::string& directory, const RunOptions& options = {},
                      SolveOutcome* outcome = nullptr);

/// One sub-run per grid point of the sweep axes, in `directory/run_NNN`,
/// then aggregate.csv and an overlay plot of the radial profiles.
RunManifest run_sweep(const ProblemConfig& config, const std::string& directory, const RunOptions& options = {});

/// Condition report only. Exit code 0 if the applicable condition holds, 1 if it
/// fails, 2 if indeterminate.
RunManifest run_conditions(const ProblemConfig& config, const std::string& directory);

/// Mean-curvature audit and wall contact trace of the configured barrier.
RunManifest run_barrier_audit(const ProblemConfig& config, const std::string& directory);

// Writers. Numbers are printed with 17 significant digits so identical runs
// give identical bytes.
std::string format_number(double v);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

void write_svg_plot(const std::string& path, const std::string& title, const std::string& xlabel,
                    const std::string& ylabel, const std::vector<PlotSeries>& series);

}  // namespace capwedge
