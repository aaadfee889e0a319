#include "capwedge/torus.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "capwedge/conditions.hpp"
#include "capwedge/error.hpp"

namespace capwedge {
namespace {

constexpr double kSingularTol = 1e-12;

struct Jet {
  double h;
  double h1, h2;
  double h11, h12, h22;
};

// Closed-form value, gradient and Hessian of the upper canonical sheet.
Jet upper_jet(double r0, Vec2 x) {
  const double q = std::sqrt(std::max(r0 * r0 - x.y * x.y, 0.0));
  const double rho = 2.0 - q;
  const double d = 2.0 - x.x;
  const double s = std::sqrt(std::max(rho * rho - d * d, 0.0));
  if (s < kSingularTol || q < kSingularTol * r0) {
    throw Error(ErrorCode::SingularPoint, "vertical tangent plane of the torus sheet");
  }
  const double drho = x.y / q;
  const double ddrho = r0 * r0 / (q * q * q);
  const double s3 = s * s * s;
  Jet j;
  j.h = s;
  j.h1 = d / s;
  j.h2 = rho * drho / s;
  j.h11 = -rho * rho / s3;
  j.h12 = -d * rho * drho / s3;
  j.h22 = (drho * drho + rho * ddrho) / s - rho * rho * drho * drho / s3;
  return j;
}

Jet signed_jet(const TorusBarrier& b, Vec2 y) {
  const Vec2 x = b.to_canonical(y);
  if (!in_canonical_footprint(b.r0, x)) throw Error(ErrorCode::OutsideFootprint, "point outside barrier footprint");
  Jet j = upper_jet(b.r0, x);
  if (b.sign == BarrierSign::Minus) {
    j.h = -j.h;
    j.h1 = -j.h1;
    j.h2 = -j.h2;
    j.h11 = -j.h11;
    j.h12 = -j.h12;
    j.h22 = -j.h22;
  }
  return j;
}

double divergence_of_flux(const Jet& j) {
  const double g2 = j.h1 * j.h1 + j.h2 * j.h2;
  const double w = std::sqrt(1.0 + g2);
  const double lap = j.h11 + j.h22;
  const double hgg = j.h1 * j.h1 * j.h11 + 2.0 * j.h1 * j.h2 * j.h12 + j.h2 * j.h2 * j.h22;
  return (lap * (1.0 + g2) - hgg) / (w * w * w);
}

}  // namespace

double minor_radius(double M2) {
  if (M2 < 0.0 || std::isnan(M2)) throw Error(ErrorCode::NegativeCurvatureBound, "M2 must be >= 0");
  if (M2 == 0.0) return 1.0;
  const double inv = 1.0 / M2;
  const double root = std::hypot(inv, 1.0);
  // 1/M2 + 1 - sqrt(1/M2^2 + 1), arranged to avoid cancellation at both ends.
  return (inv + inv * inv / (root + 1.0)) / (inv + root);
}

Vec2 TorusBarrier::to_canonical(Vec2 y) const {
  return rotate(y, alpha) + Vec2{r0 * std::cos(beta), r0 * std::sin(beta)};
}

Vec2 TorusBarrier::from_canonical(Vec2 x) const {
  return rotate(x - Vec2{r0 * std::cos(beta), r0 * std::sin(beta)}, -alpha);
}

bool TorusBarrier::in_footprint(Vec2 y, double tol) const { return in_canonical_footprint(r0, to_canonical(y), tol); }

TorusBarrier make_barrier(BarrierSign sign, double alpha, double beta, double M2) {
  if (!(beta >= -kPi / 2 && beta <= kPi / 2)) {
    std::ostringstream msg;
    msg << "beta " << beta << " outside [-pi/2, pi/2]";
    throw Error(ErrorCode::BetaOutOfRange, msg.str());
  }
  TorusBarrier b;
  b.sign = sign;
  b.alpha = alpha;
  b.beta = beta;
  b.M2 = M2;
  b.r0 = minor_radius(M2);
  return b;
}

bool in_canonical_footprint(double r0, Vec2 x, double tol) {
  return norm(x) >= r0 - tol && x.x >= -tol && x.x <= 2.0 + tol && std::abs(x.y) <= r0 + tol;
}

double canonical_height(BarrierSign sign, double r0, Vec2 x) {
  if (!in_canonical_footprint(r0, x)) throw Error(ErrorCode::OutsideFootprint, "point outside canonical footprint");
  const double q = std::sqrt(std::max(r0 * r0 - x.y * x.y, 0.0));
  const double rho = 2.0 - q;
  const double d = 2.0 - x.x;
  const double h = std::sqrt(std::max(rho * rho - d * d, 0.0));
  return sign == BarrierSign::Plus ? h : -h;
}

double barrier_height(const TorusBarrier& barrier, Vec2 y) {
  return canonical_height(barrier.sign, barrier.r0, barrier.to_canonical(y));
}

Vec2 barrier_gradient(const TorusBarrier& barrier, Vec2 y) {
  const Jet j = signed_jet(barrier, y);
  return rotate({j.h1, j.h2}, -barrier.alpha);
}

double barrier_mean_curvature_operator(const TorusBarrier& barrier, Vec2 y) {
  return divergence_of_flux(signed_jet(barrier, y));
}

double barrier_flux(const TorusBarrier& barrier, Vec2 y, Vec2 nu) {
  const Vec2 g = barrier_gradient(barrier, y);
  return dot(g, nu) / std::sqrt(1.0 + dot(g, g));
}

double torus_curvature(double r0, double cos_v) {
  return -(2.0 + 2.0 * r0 * cos_v) / (r0 * (2.0 + r0 * cos_v));
}

CurvatureAudit mean_curvature_audit(const TorusBarrier& barrier, int n, double eps) {
  const double r0 = barrier.r0;
  if (!(eps >= 1e-8 * r0)) {
    std::ostringstream msg;
    msg << "band " << eps << " below 1e-8 r0";
    throw Error(ErrorCode::BandTooNarrow, msg.str());
  }
  if (n < 2) throw Error(ErrorCode::OutOfRange, "audit grid needs n >= 2");
  CurvatureAudit audit;
  audit.min_div = audit.min_h_t = std::numeric_limits<double>::infinity();
  audit.max_div = audit.max_h_t = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const Vec2 x{2.0 * i / (n - 1), -r0 + 2.0 * r0 * k / (n - 1)};
      if (norm(x) < r0 + eps || r0 - std::abs(x.y) < eps) continue;
      const Vec2 y = barrier.from_canonical(x);
      const double div = barrier_mean_curvature_operator(barrier, y);
      const double cos_v = -std::sqrt(r0 * r0 - x.y * x.y) / r0;
      const double ht = torus_curvature(r0, cos_v);
      audit.min_div = std::min(audit.min_div, div);
      audit.max_div = std::max(audit.max_div, div);
      audit.min_h_t = std::min(audit.min_h_t, ht);
      audit.max_h_t = std::max(audit.max_h_t, ht);
      audit.samples.push_back({y, div, ht});
    }
  }
  return audit;
}

double beta_from_tau(int which, double tau) {
  if (!(tau > 0.0 && tau < kPi)) throw Error(ErrorCode::OutOfRange, "tau must lie in (0, pi)");
  double beta;
  if (which == 1) {
    beta = kPi / 2 - tau;
  } else if (which == 2) {
    beta = tau - kPi / 2;
  } else {
    throw Error(ErrorCode::OutOfRange, "which must be 1 or 2");
  }
  if (!(beta >= -kPi / 2 && beta <= kPi / 2)) throw Error(ErrorCode::BetaOutOfRange, "beta outside [-pi/2, pi/2]");
  return beta;
}

WallSegment minus_wall(double alpha, double length) {
  return {{0.0, 0.0}, from_polar(length, -alpha), {-std::sin(alpha), -std::cos(alpha)}};
}

std::vector<double> wall_contact_trace(const TorusBarrier& barrier, const WallSegment& wall, int samples) {
  if (!barrier.in_footprint(wall.start, 1e-12) || !barrier.in_footprint(wall.end, 1e-12)) {
    throw Error(ErrorCode::WallNotInFootprint, "wall endpoints outside barrier footprint");
  }
  std::vector<double> values;
  values.reserve(samples);
  for (int k = 1; k <= samples; ++k) {
    const double t = static_cast<double>(k) / (samples + 1);
    const Vec2 y = wall.start + (wall.end - wall.start) * t;
    if (!barrier.in_footprint(y, 1e-12)) throw Error(ErrorCode::WallNotInFootprint, "wall leaves footprint");
    values.push_back(barrier_flux(barrier, y, wall.normal));
  }
  return values;
}

ContactCheck contact_inequality_check(const TorusBarrier& lower, const TorusBarrier& upper,
                                      const WedgeDomain& domain, double gamma2,
                                      const std::function<double(double)>& gamma, Side side,
                                      double delta_probe) {
  if (side != Side::Minus) throw Error(ErrorCode::PreconditionsUnmet, "contact check is posed on the minus wall");
  const double tau1 = kPi / 2 - lower.beta;
  const double tau2 = upper.beta + kPi / 2;
  if (!(tau1 < gamma2) || !(tau2 > gamma2)) {
    std::ostringstream msg;
    msg << "need tau1 < gamma2 < tau2, got " << tau1 << ", " << gamma2 << ", " << tau2;
    throw Error(ErrorCode::BadAngleOrder, msg.str());
  }
  const double r_probe = std::min(delta_probe, domain.delta_star());
  const double s_max = domain.arclength_at(side, r_probe);

  // Geometric samples near O, then uniform ones out to the probe radius.
  std::vector<double> radii;
  for (int k = 60; k >= 1; --k) radii.push_back(r_probe * std::pow(2.0, -0.25 * k));
  for (int k = 1; k <= 400; ++k) radii.push_back(r_probe * k / 400.0);
  std::sort(radii.begin(), radii.end());

  ContactCheck out;
  out.delta1 = r_probe;
  out.worst_lower_margin = out.worst_upper_margin = std::numeric_limits<double>::infinity();
  double last_good = 0.0;
  for (double r : radii) {
    const Vec2 x = domain.wall_point(side, r);
    const double s = std::min(domain.arclength_at(side, r), s_max);
    const Vec2 nu = exterior_normal(domain, side, s);
    const double cg = std::cos(gamma(s));
    bool ok = lower.in_footprint(x, 1e-12) && upper.in_footprint(x, 1e-12);
    double lm = -1.0;
    double um = -1.0;
    if (ok) {
      try {
        lm = barrier_flux(lower, x, nu) - cg;
        um = cg - barrier_flux(upper, x, nu);
      } catch (const Error&) {
        ok = false;
      }
    }
    ok = ok && lm > 0.0 && um > 0.0;
    if (!ok) {
      out.delta1 = last_good > 0.0 ? r : 0.0;
      break;
    }
    out.worst_lower_margin = std::min(out.worst_lower_margin, lm);
    out.worst_upper_margin = std::min(out.worst_upper_margin, um);
    last_good = r;
  }
  out.holds = out.delta1 > 0.0;
  return out;
}

PlusWallCheck plus_wall_normals_check(double tau1, double tau2, double alpha, double lambda1, double lambda2) {
  PlusWallCheck c;
  c.n = {-std::sin(tau1 + alpha), -std::cos(tau1 + alpha)};
  c.m = {std::sin(tau2 - alpha), -std::cos(tau2 - alpha)};
  c.h_minus_ok = (tau1 + 2.0 * alpha > kPi) || (-std::cos(tau1 + 2.0 * alpha) > std::cos(lambda1));
  c.h_plus_ok = (tau2 < 2.0 * alpha) || (-std::cos(tau2 - 2.0 * alpha) < std::cos(lambda2));
  return c;
}

MuFamily mu_family(double alpha, double gamma2, double mu) {
  const ConditionReport rep = check_theorem1(alpha, gamma2);
  if (rep.condition1.verdict != Verdict::Holds) {
    throw Error(ErrorCode::Condition1Violated, "pi - 2 alpha < gamma2 < 2 alpha does not hold");
  }
  const double upper = std::min(gamma2 - (kPi - 2.0 * alpha), 2.0 * alpha - gamma2);
  if (!(mu > 0.0 && mu < upper)) {
    std::ostringstream msg;
    msg << "mu " << mu << " outside (0, " << upper << ")";
    throw Error(ErrorCode::MuOutOfRange, msg.str());
  }
  MuFamily f;
  f.mu = mu;
  f.tau1 = kPi - 2.0 * alpha + mu;
  f.tau2 = 2.0 * alpha - mu;
  f.beta = 2.0 * alpha - mu - kPi / 2;
  f.theta_mu = alpha - mu;
  f.R_mu = std::numeric_limits<double>::quiet_NaN();
  return f;
}

MuFamily mu_family(const WedgeDomain& domain, double gamma2, double mu, double M2) {
  MuFamily f = mu_family(domain.alpha(), gamma2, mu);
  f.R_mu = inscribed_radius(f, domain, minor_radius(M2));
  return f;
}

double inscribed_radius(const MuFamily& family, const WedgeDomain& domain, double r0) {
  TorusBarrier b;
  b.alpha = domain.alpha();
  b.beta = family.beta;
  b.r0 = r0;
  auto fits = [&](double R) {
    constexpr int kRadial = 160;
    constexpr int kAngular = 160;
    for (int i = 1; i <= kRadial; ++i) {
      const double r = R * i / kRadial;
      const double lo = domain.wall_angle(Side::Minus, r);
      const double hi = std::min(family.theta_mu, domain.wall_angle(Side::Plus, r));
      if (hi < lo) continue;
      for (int k = 0; k <= kAngular; ++k) {
        const double th = lo + (hi - lo) * k / kAngular;
        if (!b.in_footprint(from_polar(r, th), 1e-12)) return false;
      }
    }
    return true;
  };
  double good = 0.0;
  double bad = domain.delta_star();
  if (fits(bad)) return bad;
  while (bad - good > 1e-10) {
    const double mid = 0.5 * (good + bad);
    (fits(mid) ? good : bad) = mid;
  }
  return good;
}

double modulus_of_continuity(double r0, double s, int resolution) {
  if (!(s >= 0.0)) throw Error(ErrorCode::OutOfRange, "s must be >= 0");
  if (s == 0.0) return 0.0;
  const int nx = resolution;
  const int ny = resolution;
  const double dx = 2.0 / (nx - 1);
  const double dy = 2.0 * r0 / (ny - 1);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> h(static_cast<std::size_t>(nx) * ny, nan);
  double hmin = std::numeric_limits<double>::infinity();
  double hmax = -hmin;
  for (int i = 0; i < nx; ++i) {
    for (int k = 0; k < ny; ++k) {
      const Vec2 x{i * dx, -r0 + k * dy};
      if (!in_canonical_footprint(r0, x, 0.0)) continue;
      const double v = canonical_height(BarrierSign::Minus, r0, x);
      h[static_cast<std::size_t>(i) * ny + k] = v;
      hmin = std::min(hmin, v);
      hmax = std::max(hmax, v);
    }
  }
  const double diam = std::hypot(2.0, 2.0 * r0);
  if (s >= diam) return hmax - hmin;

  // max over |x - y| <= s of h(y) - h(x): row-wise sliding extrema of varying
  // half-width, combined over vertical offsets.
  const int kmax = static_cast<int>(std::floor(s / dy));
  double best = 0.0;
  for (int dk = -kmax; dk <= kmax; ++dk) {
    const double rem = s * s - (dk * dy) * (dk * dy);
    if (rem < 0.0) continue;
    const int w = static_cast<int>(std::floor(std::sqrt(rem) / dx + 1e-12));
    for (int k = 0; k < ny; ++k) {
      const int k2 = k + dk;
      if (k2 < 0 || k2 >= ny) continue;
      // Sliding window extrema of column k2 (indexed by i) with half-width w.
      std::deque<int> qmax, qmin;
      auto val = [&](int i) { return h[static_cast<std::size_t>(i) * ny + k2]; };
      int right = -1;
      for (int i = 0; i < nx; ++i) {
        while (right < std::min(nx - 1, i + w)) {
          ++right;
          const double v = val(right);
          if (std::isnan(v)) continue;
          while (!qmax.empty() && val(qmax.back()) <= v) qmax.pop_back();
          qmax.push_back(right);
          while (!qmin.empty() && val(qmin.back()) >= v) qmin.pop_back();
          qmin.push_back(right);
        }
        while (!qmax.empty() && qmax.front() < i - w) qmax.pop_front();
        while (!qmin.empty() && qmin.front() < i - w) qmin.pop_front();
        const double here = h[static_cast<std::size_t>(i) * ny + k];
        if (std::isnan(here) || qmax.empty()) continue;
        best = std::max({best, val(qmax.front()) - here, here - val(qmin.front())});
      }
    }
  }
  return best;
}

}  // namespace capwedge
