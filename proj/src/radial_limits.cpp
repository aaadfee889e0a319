#include "capwedge/radial_limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace capwedge {

FieldProbe::FieldProbe(const WedgeDomain& domain, const ScalarField& field)
    : domain_(&domain), field_(&field), locator_(*field.mesh), snap_tol_(1e-9 * domain.delta_star()) {}

std::optional<double> FieldProbe::value(Vec2 p) const {
  const auto hit = locator_.locate(p, snap_tol_);
  if (!hit) return std::nullopt;
  return locator_.interpolate(field_->values, *hit);
}

std::optional<double> FieldProbe::local_size(Vec2 p) const {
  const auto hit = locator_.locate(p, snap_tol_);
  if (!hit) return std::nullopt;
  return field_->mesh->triangle_diameter(hit->triangle);
}

std::vector<double> default_radii(const WedgeDomain& domain) {
  std::vector<double> radii;
  for (int k = 0; k <= 6; ++k) radii.push_back(0.25 * domain.delta_star() * std::ldexp(1.0, -k));
  return radii;
}

std::vector<double> default_theta_grid(const WedgeDomain& domain, int n) {
  std::vector<double> thetas(n);
  const double a = domain.alpha();
  for (int i = 0; i < n; ++i) thetas[i] = -a + 2.0 * a * (i + 0.5) / n;
  return thetas;
}

namespace {

void require_decreasing(const std::vector<double>& radii) {
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] < radii[k - 1]))) {
      throw Error(ErrorCode::OutOfRange, "radii must be positive and strictly decreasing");
    }
  }
}

double sample_point(const FieldProbe& probe, Vec2 p, double r) {
  const auto size = probe.local_size(p);
  const auto v = probe.value(p);
  if (!size || !v) {
    std::ostringstream msg;
    msg << "point (" << p.x << ", " << p.y << ") misses the mesh";
    throw Error(ErrorCode::RayOutsideDomain, msg.str());
  }
  if (r < 3.0 * *size) {
    std::ostringstream msg;
    msg << "radius " << r << " is below 3 local mesh sizes (" << *size << ")";
    throw Error(ErrorCode::BelowResolution, msg.str());
  }
  return *v;
}

}  // namespace

std::vector<double> sample_ray(const FieldProbe& probe, double theta, const std::vector<double>& radii) {
  require_decreasing(radii);
  std::vector<double> values;
  values.reserve(radii.size());
  for (double r : radii) {
    const Vec2 p = from_polar(r, theta);
    if (!probe.domain().contains(p, 0.0)) {
      std::ostringstream msg;
      msg << "ray theta=" << theta << " leaves the domain at r=" << r;
      throw Error(ErrorCode::RayOutsideDomain, msg.str());
    }
    values.push_back(sample_point(probe, p, r));
  }
  return values;
}

LimitFit estimate_limit(const std::vector<double>& values, const std::vector<double>& radii) {
  const std::size_t n = values.size();
  if (n < 4 || radii.size() != n) throw Error(ErrorCode::FitIllConditioned, "needs at least 4 samples");
  const auto [rmin_it, rmax_it] = std::minmax_element(radii.begin(), radii.end());
  if (!(*rmin_it > 0.0) || *rmax_it < 2.0 * *rmin_it * (1.0 - 1e-12)) {
    throw Error(ErrorCode::FitIllConditioned, "radii must be positive and span at least a factor of 2");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::FitIllConditioned, "non-finite sample");
  }
  const std::size_t last = static_cast<std::size_t>(rmin_it - radii.begin());
  const auto [vmin, vmax] = std::minmax_element(values.begin(), values.end());
  double scale = 1.0;
  for (double v : values) scale = std::max(scale, std::abs(v));

  LimitFit fit;
  if (*vmax - *vmin <= 1e-12 * scale) {
    fit.limit = std::accumulate(values.begin(), values.end(), 0.0) / n;
    fit.error_bar = *vmax - *vmin;
    return fit;
  }

  // For fixed p the model is linear in (L, c); p is found by a scan and a
  // golden-section refinement of the residual sum of squares.
  const double rref = *rmax_it;
  auto solve_p = [&](double p, double& L, double& c) {
    double mx = 0.0, mv = 0.0;
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = std::pow(radii[k] / rref, p);
      mx += x[k];
      mv += values[k];
    }
    mx /= n;
    mv /= n;
    double sxx = 0.0, sxv = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      sxx += (x[k] - mx) * (x[k] - mx);
      sxv += (x[k] - mx) * (values[k] - mv);
    }
    c = sxx > 0.0 ? sxv / sxx : 0.0;
    L = mv - c * mx;
    double sse = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double e = values[k] - L - c * x[k];
      sse += e * e;
    }
    return sse;
  };
  constexpr double kPmin = 0.1;
  constexpr double kPmax = 3.0;
  constexpr double kStep = 0.01;
  double best_p = kPmin;
  double best = std::numeric_limits<double>::infinity();
  double L = 0.0, c = 0.0;
  for (int i = 0; kPmin + i * kStep <= kPmax + 1e-12; ++i) {
    const double p = kPmin + i * kStep;
    const double sse = solve_p(p, L, c);
    if (sse < best) {
      best = sse;
      best_p = p;
    }
  }
  double a = std::max(kPmin, best_p - kStep);
  double b = std::min(kPmax, best_p + kStep);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = solve_p(x1, L, c), f2 = solve_p(x2, L, c);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = solve_p(x1, L, c);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = solve_p(x2, L, c);
    }
  }
  double p = 0.5 * (a + b);
  if (solve_p(p, L, c) > best) {
    p = best_p;
  }
  solve_p(p, L, c);

  double max_res = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    max_res = std::max(max_res, std::abs(values[k] - L - c * std::pow(radii[k] / rref, p)));
  }
  fit.limit = L;
  fit.exponent = p;
  fit.coefficient = c * std::pow(rref, -p);
  fit.error_bar = std::max(max_res, 0.5 * std::abs(values[last] - L));
  return fit;
}

LimitFit side_limit(const FieldProbe& probe, Side side, const std::vector<double>& radii) {
  if (side != Side::Minus) throw Error(ErrorCode::PreconditionsUnmet, "side limit is taken along the SideMinus arc");
  require_decreasing(radii);
  std::vector<double> values;
  values.reserve(radii.size());
  for (double r : radii) {
    if (r > probe.domain().delta_star()) throw Error(ErrorCode::OutOfRange, "radius beyond delta_star");
    values.push_back(sample_point(probe, probe.domain().wall_point(side, r), r));
  }
  return estimate_limit(values, radii);
}

RadialProfile radial_profile(const FieldProbe& probe, const std::vector<double>& thetas,
                             const std::vector<double>& radii) {
  for (std::size_t i = 1; i < thetas.size(); ++i) {
    if (!(thetas[i] > thetas[i - 1])) throw Error(ErrorCode::OutOfRange, "theta grid must be strictly increasing");
  }
  RadialProfile profile;
  profile.theta_grid = thetas;
  profile.radii = radii;
  for (double theta : thetas) {
    if (!(std::abs(theta) < probe.domain().alpha())) {
      throw Error(ErrorCode::RayOutsideDomain, "theta outside (-alpha, alpha)");
    }
    auto values = sample_ray(probe, theta, radii);
    const LimitFit fit = estimate_limit(values, radii);
    profile.limits.push_back(fit.limit);
    profile.errors.push_back(fit.error_bar);
    profile.fit_exponents.push_back(fit.exponent);
    profile.samples.push_back(std::move(values));
  }
  return profile;
}

std::string kind_name(const Classification& c) {
  if (std::holds_alternative<ConstantAll>(c.kind)) return "ConstantAll";
  if (std::holds_alternative<Fan>(c.kind)) return "Fan";
  return "Unclassified";
}

Classification classify(const RadialProfile& profile, const LimitFit& z2, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::OutOfRange, "tolerance must be positive");
  const auto& v = profile.limits;
  const std::size_t n = v.size();
  if (n < 2) throw Error(ErrorCode::NoisyProfile, "profile needs at least 2 rays");
  const auto noisy = std::count_if(profile.errors.begin(), profile.errors.end(), [&](double e) { return e > tol / 4; });
  if (static_cast<double>(noisy) > 0.1 * n) {
    std::ostringstream msg;
    msg << noisy << " of " << n << " rays have error bars above tol/4 = " << tol / 4;
    throw Error(ErrorCode::NoisyProfile, msg.str());
  }

  Classification out;
  out.tolerance = tol;
  out.side_mismatch = std::abs(v.front() - z2.limit);
  for (std::size_t i = 1; i < n; ++i) out.total_variation += std::abs(v[i] - v[i - 1]);
  if (out.side_mismatch > tol) {
    out.kind = Unclassified{"first ray disagrees with the side limit"};
    return out;
  }
  if (out.total_variation <= tol) {
    out.kind = ConstantAll{};
    return out;
  }

  // Longest plateau from the SideMinus end, anchored at z2.
  std::size_t i1 = 0;
  double lo = std::min(z2.limit, v[0]), hi = std::max(z2.limit, v[0]);
  while (i1 + 1 < n) {
    const double nlo = std::min(lo, v[i1 + 1]), nhi = std::max(hi, v[i1 + 1]);
    if (nhi - nlo > tol) break;
    lo = nlo;
    hi = nhi;
    ++i1;
  }
  std::size_t i2 = n - 1;
  lo = hi = v[n - 1];
  while (i2 > 0) {
    const double nlo = std::min(lo, v[i2 - 1]), nhi = std::max(hi, v[i2 - 1]);
    if (nhi - nlo > tol) break;
    lo = nlo;
    hi = nhi;
    --i2;
  }
  // Overlapping plateaus mean the ramp is narrower than 2 tol; the lower
  // plateau then ends where the upper one begins.
  if (i2 == 0) {
    out.kind = Unclassified{"spread within tolerance but variation above it"};
    return out;
  }
  i1 = std::min(i1, i2 - 1);
  const double net = v[n - 1] - v[0];
  if (std::abs(net) <= tol / 2) {
    out.kind = Unclassified{"no net change across the profile"};
    return out;
  }
  const double sign = net > 0.0 ? 1.0 : -1.0;
  double running = sign * v[i1];
  for (std::size_t i = i1 + 1; i <= i2; ++i) {
    const double step = sign * (v[i] - v[i - 1]);
    if (step < -tol / 2) {
      out.kind = Unclassified{"step against the trend"};
      return out;
    }
    running = std::max(running, sign * v[i]);
    if (running - sign * v[i] > tol / 2) {
      out.kind = Unclassified{"interior extremum beyond tolerance"};
      return out;
    }
  }
  out.kind = Fan{profile.theta_grid[i1], profile.theta_grid[i2],
                 sign > 0.0 ? FanDirection::Increasing : FanDirection::Decreasing};
  return out;
}

double default_tolerance(const RadialProfile& coarse, const RadialProfile& fine) {
  if (coarse.theta_grid != fine.theta_grid || coarse.radii != fine.radii || coarse.samples.empty()) {
    throw Error(ErrorCode::OutOfRange, "profiles must share the ray grid and radii");
  }
  double diff = 0.0;
  double scale = 1.0;
  for (std::size_t i = 0; i < coarse.samples.size(); ++i) {
    diff = std::max(diff, std::abs(coarse.samples[i].back() - fine.samples[i].back()));
    scale = std::max(scale, std::abs(fine.samples[i].back()));
  }
  return 10.0 * std::max(diff, 1e-10 * scale);
}

}  // namespace capwedge
