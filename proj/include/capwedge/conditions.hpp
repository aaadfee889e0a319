#pragma once

#include <optional>
#include <string>

namespace capwedge {

enum class Verdict { Holds, Fails, Indeterminate };

const char* to_string(Verdict v);

/// Margins closer to zero than this are reported as Indeterminate: the
/// admissibility conditions are strict inequalities.
inline constexpr double kStrictnessBand = 1e-12;

struct Condition1 {
  Verdict verdict{Verdict::Fails};
  double lower_margin{0.0};  // gamma2 - (pi - 2 alpha)
  double upper_margin{0.0};  // 2 alpha - gamma2
  std::string reason;        // empty, "AlphaTooSmall", "AlphaTooLarge", "GammaTooSmall", ...
};

struct Condition2 {
  Verdict verdict{Verdict::Fails};
  bool prerequisite{false};  // 0 < lambda2 - lambda1 < 4 alpha
  double lower_margin{0.0};  // gamma2 - (pi - 2 alpha - lambda1)
  double upper_margin{0.0};  // (pi + 2 alpha - lambda2) - gamma2
  std::string reason;
};

struct ConcusFinn {
  bool admissible{false};
  double slack{0.0};  // 2 alpha - |pi - gamma1 - gamma2|
};

struct ComparisonAngles {
  double tau1;
  double tau2;
  double beta1;
  double beta2;
};

struct ConditionReport {
  double alpha{0.0};
  double gamma2{0.0};
  Condition1 condition1;
  std::optional<Condition2> condition2;
  std::optional<ConcusFinn> concus_finn;
  std::optional<ComparisonAngles> chosen;
};

ConditionReport check_theorem1(double alpha, double gamma2);
ConditionReport check_theorem2(double alpha, double gamma2, double lambda1, double lambda2);
ConcusFinn concus_finn_admissible(double alpha, double gamma1, double gamma2);

enum class AngleStrategy { Midpoint };

struct ContactBounds {
  double lambda1;
  double lambda2;
};

/// Picks tau1 < gamma2 < tau2 inside the admissible interval (with lambdas the
/// interval of the plus-wall variant) and the matching anchor angles.
/// Throws ConditionViolated.
ComparisonAngles choose_comparison_angles(double alpha, double gamma2, std::optional<ContactBounds> lambdas = {},
                                          AngleStrategy strategy = AngleStrategy::Midpoint);

/// Overall verdict: the plus-wall condition when its block is present, else the corner condition.
Verdict overall_verdict(const ConditionReport& report);

}  // namespace capwedge
