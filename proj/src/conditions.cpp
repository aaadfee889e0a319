#include "capwedge/conditions.hpp"

#include <algorithm>
#include <cmath>

#include "capwedge/error.hpp"
#include "capwedge/torus.hpp"
#include "capwedge/vec2.hpp"

namespace capwedge {
namespace {

Verdict strict_pair(double lower, double upper) {
  if (std::abs(lower) < kStrictnessBand || std::abs(upper) < kStrictnessBand) return Verdict::Indeterminate;
  return lower > 0.0 && upper > 0.0 ? Verdict::Holds : Verdict::Fails;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "?";
}

ConditionReport check_theorem1(double alpha, double gamma2) {
  ConditionReport rep;
  rep.alpha = alpha;
  rep.gamma2 = gamma2;
  Condition1& c = rep.condition1;
  c.lower_margin = gamma2 - (kPi - 2.0 * alpha);
  c.upper_margin = 2.0 * alpha - gamma2;
  if (alpha <= kPi / 4) {
    c.verdict = Verdict::Fails;
    c.reason = "AlphaTooSmall";
  } else if (alpha > kPi / 2) {
    c.verdict = Verdict::Fails;
    c.reason = "AlphaTooLarge";
  } else {
    c.verdict = strict_pair(c.lower_margin, c.upper_margin);
    if (c.verdict == Verdict::Fails) c.reason = c.lower_margin <= 0.0 ? "GammaTooSmall" : "GammaTooLarge";
    if (c.verdict == Verdict::Indeterminate) c.reason = "MarginAtBoundary";
  }
  return rep;
}

ConditionReport check_theorem2(double alpha, double gamma2, double lambda1, double lambda2) {
  ConditionReport rep = check_theorem1(alpha, gamma2);
  Condition2 c;
  const double spread = lambda2 - lambda1;
  c.prerequisite = spread > 0.0 && spread < 4.0 * alpha;
  c.lower_margin = gamma2 - (kPi - 2.0 * alpha - lambda1);
  c.upper_margin = (kPi + 2.0 * alpha - lambda2) - gamma2;
  if (!(alpha > 0.0 && alpha <= kPi / 2)) {
    c.verdict = Verdict::Fails;
    c.reason = "AlphaOutOfRange";
  } else if (!c.prerequisite) {
    c.verdict = Verdict::Fails;
    c.reason = "LambdaSpread";
  } else {
    c.verdict = strict_pair(c.lower_margin, c.upper_margin);
    if (c.verdict == Verdict::Fails) c.reason = c.lower_margin <= 0.0 ? "GammaTooSmall" : "GammaTooLarge";
    if (c.verdict == Verdict::Indeterminate) c.reason = "MarginAtBoundary";
  }
  rep.condition2 = c;
  return rep;
}

ConcusFinn concus_finn_admissible(double alpha, double gamma1, double gamma2) {
  ConcusFinn cf;
  cf.slack = 2.0 * alpha - std::abs(kPi - gamma1 - gamma2);
  if (std::abs(cf.slack) < kStrictnessBand) cf.slack = 0.0;
  cf.admissible = cf.slack >= 0.0;
  return cf;
}

ComparisonAngles choose_comparison_angles(double alpha, double gamma2, std::optional<ContactBounds> lambdas,
                                          AngleStrategy /*strategy*/) {
  double lo;
  double hi;
  if (lambdas) {
    const ConditionReport rep = check_theorem2(alpha, gamma2, lambdas->lambda1, lambdas->lambda2);
    if (rep.condition2->verdict != Verdict::Holds) {
      throw Error(ErrorCode::ConditionViolated, "plus-wall condition does not hold: " + rep.condition2->reason);
    }
    lo = kPi - 2.0 * alpha - lambdas->lambda1;
    hi = kPi + 2.0 * alpha - lambdas->lambda2;
  } else {
    const ConditionReport rep = check_theorem1(alpha, gamma2);
    if (rep.condition1.verdict != Verdict::Holds) {
      throw Error(ErrorCode::ConditionViolated, "corner condition does not hold: " + rep.condition1.reason);
    }
    lo = kPi - 2.0 * alpha;
    hi = 2.0 * alpha;
  }
  // tau must stay in (0, pi).
  lo = std::max(lo, 0.0);
  hi = std::min(hi, kPi);
  ComparisonAngles a;
  a.tau1 = 0.5 * (lo + gamma2);
  a.tau2 = 0.5 * (gamma2 + hi);
  if (!(a.tau1 < gamma2 && gamma2 < a.tau2)) {
    throw Error(ErrorCode::ConditionViolated, "no room for comparison angles around gamma2");
  }
  a.beta1 = beta_from_tau(1, a.tau1);
  a.beta2 = beta_from_tau(2, a.tau2);
  return a;
}

Verdict overall_verdict(const ConditionReport& report) {
  if (report.condition2) return report.condition2->verdict;
  return report.condition1.verdict;
}

}  // namespace capwedge
