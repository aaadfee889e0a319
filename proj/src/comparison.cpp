#include "capwedge/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace capwedge {

double p_of_delta(double M0, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    std::ostringstream msg;
    msg << "delta=" << delta << " outside (0, 1)";
    throw Error(ErrorCode::DeltaOutOfRange, msg.str());
  }
  if (!(M0 > 0.0)) throw Error(ErrorCode::OutOfRange, "graph area must be positive");
  return std::sqrt(8.0 * kPi * M0 / std::log(1.0 / delta));
}

CircleSamples sample_circle(const FieldProbe& probe, double r, int samples) {
  const WedgeDomain& domain = probe.domain();
  if (!(r > 0.0 && r < domain.delta_star())) {
    throw Error(ErrorCode::OutOfRange, "circle radius must lie in (0, delta_star)");
  }
  if (samples < 2) throw Error(ErrorCode::OutOfRange, "need at least 2 samples");
  const double lo = domain.wall_angle(Side::Minus, r);
  const double hi = domain.wall_angle(Side::Plus, r);
  CircleSamples out;
  out.theta.reserve(samples);
  out.values.reserve(samples);
  for (int j = 0; j < samples; ++j) {
    const double theta = lo + (hi - lo) * j / (samples - 1);
    const Vec2 p = from_polar(r, theta);
    const auto size = probe.local_size(p);
    const auto v = probe.value(p);
    if (!size || !v) throw Error(ErrorCode::RayOutsideDomain, "circle sample misses the mesh");
    if (r < 3.0 * *size) {
      std::ostringstream msg;
      msg << "radius " << r << " is below 3 local mesh sizes (" << *size << ")";
      throw Error(ErrorCode::BelowResolution, msg.str());
    }
    out.theta.push_back(theta);
    out.values.push_back(*v);
  }
  const auto [mn, mx] = std::minmax_element(out.values.begin(), out.values.end());
  out.oscillation = *mx - *mn;
  return out;
}

double oscillation_on_circle(const FieldProbe& probe, double r) { return sample_circle(probe, r).oscillation; }

Vec2 median_anchor(const FieldProbe& probe, double r) {
  const CircleSamples c = sample_circle(probe, r);
  std::vector<std::size_t> order(c.values.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t mid = order.size() / 2;
  std::nth_element(order.begin(), order.begin() + mid, order.end(),
                   [&](std::size_t a, std::size_t b) { return c.values[a] < c.values[b]; });
  return from_polar(r, c.theta[order[mid]]);
}

SandwichReport sandwich_check(const FieldProbe& probe, const MuFamily& family, const TorusBarrier& upper,
                              const TorusBarrier& lower, const std::function<double(double)>& gamma_minus,
                              double delta, double M0, std::optional<Vec2> w) {
  const WedgeDomain& domain = probe.domain();
  constexpr double kAngleTol = 1e-12;
  if (upper.sign != BarrierSign::Plus || lower.sign != BarrierSign::Minus ||
      std::abs(upper.beta - family.beta) > kAngleTol || std::abs(lower.beta - family.beta) > kAngleTol ||
      std::abs(upper.alpha - domain.alpha()) > kAngleTol || std::abs(lower.alpha - domain.alpha()) > kAngleTol ||
      upper.r0 != lower.r0) {
    throw Error(ErrorCode::PreconditionsUnmet, "barriers are not the h+-_mu pair of this family");
  }

  SandwichReport rep;
  rep.p_delta = p_of_delta(M0, delta);
  rep.radius = std::sqrt(delta) * domain.delta_star();

  ContactCheck contact;
  try {
    contact = contact_inequality_check(lower, upper, domain, gamma_minus(0.0), gamma_minus, Side::Minus, rep.radius);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BadAngleOrder) throw;
    throw Error(ErrorCode::PreconditionsUnmet, e.what());
  }
  if (!contact.holds) {
    throw Error(ErrorCode::PreconditionsUnmet, "contact inequalities fail next to O for this contact angle");
  }

  rep.w = w ? *w : median_anchor(probe, rep.radius);
  const auto fw = probe.value(rep.w);
  if (!fw) throw Error(ErrorCode::PreconditionsUnmet, "anchor point misses the mesh");
  rep.f_w = *fw;

  const ScalarField& field = probe.field();
  const Mesh& mesh = *field.mesh;
  rep.M1 = field.sup_abs();
  rep.vacuous_band = rep.p_delta >= 2.0 * rep.M1;
  rep.min_gap_lower = rep.min_gap_upper = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const Vec2 x = mesh.vertices[v];
    if (norm(x) >= rep.radius || !upper.in_footprint(x) || !lower.in_footprint(x)) continue;
    SandwichPoint pt{x, field.values[v], rep.f_w - rep.p_delta + barrier_height(upper, x),
                     rep.f_w + rep.p_delta + barrier_height(lower, x)};
    rep.min_gap_lower = std::min(rep.min_gap_lower, pt.f - pt.lower);
    rep.min_gap_upper = std::min(rep.min_gap_upper, pt.upper - pt.f);
    rep.region.push_back(pt);
  }
  if (rep.region.empty()) {
    throw Error(ErrorCode::BarrierFootprintMiss, "no mesh vertex of the probe ball lies in the barrier footprint");
  }
  rep.valid = rep.min_gap_lower > 0.0 && rep.min_gap_upper > 0.0;
  return rep;
}

Region footprint_region(const WedgeDomain& domain, const TorusBarrier& barrier) {
  return [&domain, barrier](Vec2 x) { return domain.contains(x) && barrier.in_footprint(x); };
}

double uniform_continuity_probe(const ScalarField& field, const Region& region, double d, int max_points) {
  if (!(d > 0.0)) throw Error(ErrorCode::OutOfRange, "pair distance must be positive");
  const Mesh& mesh = *field.mesh;
  std::vector<int> inside;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (region(mesh.vertices[v])) inside.push_back(static_cast<int>(v));
  }
  std::vector<int> pts;
  const std::size_t stride = std::max<std::size_t>(1, (inside.size() + max_points - 1) / std::max(1, max_points));
  for (std::size_t i = 0; i < inside.size(); i += stride) pts.push_back(inside[i]);

  // Bucket by cells of side d; neighbours of a point lie in the 3x3 block.
  auto key = [d](Vec2 p) {
    const auto ix = static_cast<long long>(std::floor(p.x / d));
    const auto iy = static_cast<long long>(std::floor(p.y / d));
    return std::pair{ix, iy};
  };
  struct Hash {
    std::size_t operator()(const std::pair<long long, long long>& k) const {
      return std::hash<long long>()(k.first * 73856093LL ^ k.second * 19349663LL);
    }
  };
  std::unordered_map<std::pair<long long, long long>, std::vector<int>, Hash> cells;
  for (int v : pts) cells[key(mesh.vertices[v])].push_back(v);

  double worst = 0.0;
  for (int a : pts) {
    const Vec2 pa = mesh.vertices[a];
    const auto [ix, iy] = key(pa);
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = cells.find({ix + dx, iy + dy});
        if (it == cells.end()) continue;
        for (int b : it->second) {
          if (b <= a || norm(mesh.vertices[b] - pa) > d) continue;
          worst = std::max(worst, std::abs(field.values[a] - field.values[b]));
        }
      }
    }
  }
  return worst;
}

}  // namespace capwedge
