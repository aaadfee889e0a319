#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "capwedge/geometry.hpp"
#include "capwedge/pmc_solver.hpp"
#include "capwedge/torus.hpp"

namespace capwedge {

/// Angle literal: a number, or an expression "a*pi/b" with optional a and b
/// ("pi/3", "7*pi/9", "0.6*pi", "-pi/2").
double parse_angle(const std::string& text);

struct MeshConfig {
  double h_max{0.05};
  double grading{1.0};
};

struct RadialConfig {
  int rays{24};
  double r_max_fraction{0.25};  // r_max = fraction * delta_star
  int levels{7};                // radii r_max 2^-k, k < levels
  std::optional<double> tol;    // default: 10 x innermost change under refinement
};

struct SandwichConfig {
  double mu{0.0};
  double delta{0.05};
};

struct BarrierConfig {
  BarrierSign sign{BarrierSign::Plus};
  double alpha{0.0};
  double beta{0.0};
  double M2{0.0};
  int grid{200};
  double band{1e-3};
};

struct SweepAxis {
  std::string key;  // dotted path(s) into the config document, comma separated
  std::vector<nlohmann::json> values;
};

/// Parsed problem file. `document` keeps the validated JSON for snapshots
/// and for sweep overrides.
struct ProblemConfig {
  nlohmann::json document;
  std::string name;

  double alpha{0.0};
  double delta_star{1.0};
  ArcSpec plus_arc;
  ArcSpec minus_arc;
  MeshConfig mesh;
  MeanCurvatureSpec H;
  BoundarySpec bc;
  SolverOptions solver;

  bool theorem_checks{false};
  std::optional<double> gamma2;
  std::optional<double> gamma1;  // SidePlus limit angle, for the Concus-Finn check
  std::optional<double> lambda1;
  std::optional<double> lambda2;

  RadialConfig radial;
  bool refine_for_tolerance{true};
  std::optional<SandwichConfig> sandwich;
  std::optional<BarrierConfig> barrier;
  std::vector<SweepAxis> sweep;
};

/// Throws ConfigError naming the offending key (or the line of a syntax error).
ProblemConfig parse_config(const nlohmann::json& document);
ProblemConfig parse_config_text(const std::string& text);
ProblemConfig load_config(const std::string& path);

/// Replaces the value at a dotted path ("boundary.side_minus.gamma").
/// Throws ConfigError when an intermediate key is missing.
nlohmann::json with_override(const nlohmann::json& document, const std::string& key, const nlohmann::json& value);

/// `keys` is one dotted path or several joined by commas, all set to `value`.
nlohmann::json apply_sweep_value(const nlohmann::json& document, const std::string& keys, const nlohmann::json& value);

/// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& document);

}  // namespace capwedge
