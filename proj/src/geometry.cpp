#include "capwedge/geometry.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "capwedge/error.hpp"

namespace capwedge {
namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 8> kGaussX = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                           0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                           0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kGaussW = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                           0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                           0.0622535239386479, 0.0271524594117541};

template <typename F>
double integrate(F&& f, double a, double b, int panels = 8) {
  double total = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    for (std::size_t i = 0; i < kGaussX.size(); ++i) {
      total += kGaussW[i] * half * (f(mid - half * kGaussX[i]) + f(mid + half * kGaussX[i]));
    }
  }
  return total;
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidAngle: return "InvalidAngle";
    case ErrorCode::ArcsCross: return "ArcsCross";
    case ErrorCode::InvalidArc: return "InvalidArc";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::TooCoarse: return "TooCoarse";
    case ErrorCode::QualityFailure: return "QualityFailure";
    case ErrorCode::NegativeCurvatureBound: return "NegativeCurvatureBound";
    case ErrorCode::OutsideFootprint: return "OutsideFootprint";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::BandTooNarrow: return "BandTooNarrow";
    case ErrorCode::BetaOutOfRange: return "BetaOutOfRange";
    case ErrorCode::WallNotInFootprint: return "WallNotInFootprint";
    case ErrorCode::BadAngleOrder: return "BadAngleOrder";
    case ErrorCode::MuOutOfRange: return "MuOutOfRange";
    case ErrorCode::Condition1Violated: return "Condition1Violated";
    case ErrorCode::ConditionViolated: return "ConditionViolated";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::IllPosed: return "IllPosed";
    case ErrorCode::LineSearchStalled: return "LineSearchStalled";
    case ErrorCode::RayOutsideDomain: return "RayOutsideDomain";
    case ErrorCode::BelowResolution: return "BelowResolution";
    case ErrorCode::FitIllConditioned: return "FitIllConditioned";
    case ErrorCode::NoisyProfile: return "NoisyProfile";
    case ErrorCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::BarrierFootprintMiss: return "BarrierFootprintMiss";
    case ErrorCode::PreconditionsUnmet: return "PreconditionsUnmet";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

double ArcSpec::offset(double r) const {
  double value = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) value = value * r + *it;
  return value;
}

double ArcSpec::offset_derivative(double r) const {
  double value = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 1;) value = value * r + static_cast<double>(k) * coeffs_[k];
  return value;
}

bool ArcSpec::is_straight() const {
  for (double c : coeffs_) {
    if (c != 0.0) return false;
  }
  return true;
}

double WedgeDomain::wall_angle(Side side, double r) const {
  return (side == Side::Plus ? alpha_ : -alpha_) + arc(side).offset(r);
}

Vec2 WedgeDomain::wall_point(Side side, double r) const { return from_polar(r, wall_angle(side, r)); }

Vec2 WedgeDomain::wall_tangent(Side side, double r) const {
  const double th = wall_angle(side, r);
  const double rdth = r * arc(side).offset_derivative(r);
  const Vec2 t{std::cos(th) - rdth * std::sin(th), std::sin(th) + rdth * std::cos(th)};
  return t / norm(t);
}

double WedgeDomain::arclength_at(Side side, double r) const {
  if (arc(side).is_straight()) return r;
  const ArcSpec& a = arc(side);
  return integrate([&](double rho) { return std::hypot(1.0, rho * a.offset_derivative(rho)); }, 0.0, r);
}

double WedgeDomain::radius_at_arclength(Side side, double s) const {
  if (arc(side).is_straight()) return s;
  const ArcSpec& a = arc(side);
  // Newton on s(r) = s, ds/dr >= 1 keeps this well behaved.
  double r = s;
  for (int it = 0; it < 50; ++it) {
    const double g = arclength_at(side, r) - s;
    const double dg = std::hypot(1.0, r * a.offset_derivative(r));
    const double step = g / dg;
    r -= step;
    if (r < 0.0) r = 0.0;
    if (std::abs(step) <= 1e-15 * std::max(1.0, s)) break;
  }
  return r;
}

bool WedgeDomain::contains(Vec2 p, double tol) const {
  const Polar pc = polar_of(p);
  if (pc.r > delta_star_ + tol) return false;
  if (pc.r <= tol) return true;
  const double r = std::min(pc.r, delta_star_);
  const double lo = wall_angle(Side::Minus, r);
  const double hi = wall_angle(Side::Plus, r);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  return std::abs(wrap_angle(pc.theta - mid)) <= half + tol / pc.r;
}

double WedgeDomain::area() const {
  return integrate(
      [&](double r) { return r * (wall_angle(Side::Plus, r) - wall_angle(Side::Minus, r)); }, 0.0,
      delta_star_);
}

WedgeDomain build_wedge(double alpha, double delta_star, ArcSpec plus, ArcSpec minus) {
  if (!(alpha > 0.0 && alpha < kPi)) {
    std::ostringstream msg;
    msg << "half-angle " << alpha << " outside (0, pi)";
    throw Error(ErrorCode::InvalidAngle, msg.str());
  }
  if (!(delta_star > 0.0) || !std::isfinite(delta_star)) {
    throw Error(ErrorCode::OutOfRange, "delta_star must be positive");
  }
  for (const ArcSpec* a : {&plus, &minus}) {
    if (!a->coeffs().empty() && a->coeffs().front() != 0.0) {
      throw Error(ErrorCode::InvalidArc, "arc offset must vanish at the corner");
    }
  }
  WedgeDomain domain(alpha, delta_star, std::move(plus), std::move(minus));

  constexpr int kSamples = 4096;
  for (int i = 1; i <= kSamples; ++i) {
    const double r = delta_star * i / kSamples;
    const double gap = domain.wall_angle(Side::Plus, r) - domain.wall_angle(Side::Minus, r);
    if (!(gap > 0.0 && gap < 2.0 * kPi)) {
      std::ostringstream msg;
      msg << "walls meet at r = " << r;
      throw Error(ErrorCode::ArcsCross, msg.str());
    }
  }

  // Finite-difference tangent audit close to the corner.
  const double r_probe = 1e-6 * delta_star;
  for (Side side : {Side::Plus, Side::Minus}) {
    const Vec2 a = domain.wall_point(side, 0.5 * r_probe);
    const Vec2 b = domain.wall_point(side, 1.5 * r_probe);
    const double dir = std::atan2(b.y - a.y, b.x - a.x);
    const double expect = side == Side::Plus ? alpha : -alpha;
    if (std::abs(wrap_angle(dir - expect)) > 1e-6) {
      throw Error(ErrorCode::InvalidArc, "wall tangent does not approach the corner ray");
    }
  }
  return domain;
}

Vec2 exterior_normal(const WedgeDomain& domain, Side side, double s) {
  const double len = domain.arc_length(side);
  if (!(s >= 0.0 && s <= len * (1.0 + 1e-14))) {
    std::ostringstream msg;
    msg << "arclength " << s << " outside [0, " << len << "]";
    throw Error(ErrorCode::OutOfRange, msg.str());
  }
  const double r = domain.radius_at_arclength(side, std::min(s, len));
  const Vec2 t = domain.wall_tangent(side, r);
  return side == Side::Plus ? Vec2{-t.y, t.x} : Vec2{t.y, -t.x};
}

Polar polar_of(Vec2 p) {
  if (p.x == 0.0 && p.y == 0.0) return {0.0, 0.0};
  return {std::hypot(p.x, p.y), std::atan2(p.y, p.x)};
}

}  // namespace capwedge
