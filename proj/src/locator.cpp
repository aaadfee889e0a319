#include <algorithm>
#include <cmath>
#include <limits>

#include "capwedge/mesh.hpp"

namespace capwedge {

// Buckets live in (log r, theta) space so that the strongly graded corner
// region is split as finely as the bulk.
namespace {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

}  // namespace

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh) {
  double r_min = std::numeric_limits<double>::infinity();
  double r_max = 0.0;
  for (const Vec2& p : mesh.vertices) {
    const double r = norm(p);
    r_max = std::max(r_max, r);
    if (r > 0.0) r_min = std::min(r_min, r);
  }
  lo_ = {std::log(r_min * 0.5), -kPi};
  const double hi_log = std::log(r_max * (1.0 + 1e-9));
  constexpr double kLogBin = 0.05;
  nx_ = std::max(1, static_cast<int>(std::ceil((hi_log - lo_.x) / kLogBin)));
  cell_ = (hi_log - lo_.x) / nx_;
  const double per = static_cast<double>(mesh.triangles.size()) / (8.0 * nx_);
  ny_ = std::clamp(static_cast<int>(std::ceil(per)), 1, 4096);
  buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});

  const double dth = 2.0 * kPi / ny_;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec2 a = mesh.vertices[tri[0]];
    const Vec2 b = mesh.vertices[tri[1]];
    const Vec2 c = mesh.vertices[tri[2]];
    const Vec2 o{};
    double rmax = std::max({norm(a), norm(b), norm(c)});
    const double c1 = cross(b - a, o - a);
    const double c2 = cross(c - b, o - b);
    const double c3 = cross(a - c, o - c);
    const bool contains_o = c1 >= 0.0 && c2 >= 0.0 && c3 >= 0.0;
    double rmin = contains_o ? 0.0
                             : std::min({point_segment_distance(o, a, b), point_segment_distance(o, b, c),
                                         point_segment_distance(o, c, a)});
    int ix0 = 0;
    if (rmin > 0.0) ix0 = std::clamp(static_cast<int>(std::floor((std::log(rmin) - lo_.x) / cell_)), 0, nx_ - 1);
    const int ix1 = std::clamp(static_cast<int>(std::floor((std::log(rmax) - lo_.x) / cell_)), 0, nx_ - 1);
    int iy0 = 0;
    int iy1 = ny_ - 1;
    if (!contains_o && rmin > 0.0) {
      // Angular extent of a triangle not containing O is spanned by its vertices;
      // unwrap relative to the first vertex.
      const double t0 = std::atan2(a.y, a.x);
      double lo = 0.0;
      double hi = 0.0;
      for (Vec2 p : {b, c}) {
        double d = std::remainder(std::atan2(p.y, p.x) - t0, 2.0 * kPi);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
      const double s0 = t0 + lo + kPi;
      const double s1 = t0 + hi + kPi;
      iy0 = static_cast<int>(std::floor(s0 / dth));
      iy1 = static_cast<int>(std::floor(s1 / dth));
      if (iy1 - iy0 >= ny_) {
        iy0 = 0;
        iy1 = ny_ - 1;
      }
    }
    for (int ix = ix0; ix <= ix1; ++ix) {
      for (int iy = iy0; iy <= iy1; ++iy) {
        const int wy = ((iy % ny_) + ny_) % ny_;
        buckets_[static_cast<std::size_t>(ix) * ny_ + wy].push_back(static_cast<int>(t));
      }
    }
  }
}

std::array<double, 3> PointLocator::barycentric(int t, Vec2 p) const {
  const auto& tri = mesh_->triangles[t];
  const Vec2 a = mesh_->vertices[tri[0]];
  const Vec2 b = mesh_->vertices[tri[1]];
  const Vec2 c = mesh_->vertices[tri[2]];
  const double det = cross(b - a, c - a);
  const double l1 = cross(p - a, c - a) / det;
  const double l2 = cross(b - a, p - a) / det;
  return {1.0 - l1 - l2, l1, l2};
}

std::optional<PointLocator::Hit> PointLocator::locate(Vec2 p, double tol) const {
  const double r = norm(p);
  int ix = 0;
  if (r > 0.0) ix = static_cast<int>(std::floor((std::log(r) - lo_.x) / cell_));
  ix = std::clamp(ix, 0, nx_ - 1);
  const double dth = 2.0 * kPi / ny_;
  const int iy = std::clamp(static_cast<int>(std::floor((std::atan2(p.y, p.x) + kPi) / dth)), 0, ny_ - 1);

  std::optional<Hit> best;
  double best_score = -std::numeric_limits<double>::infinity();
  auto scan = [&](int bx, int by) {
    if (bx < 0 || bx >= nx_) return;
    by = ((by % ny_) + ny_) % ny_;
    for (int t : buckets_[static_cast<std::size_t>(bx) * ny_ + by]) {
      const auto bary = barycentric(t, p);
      const double score = std::min({bary[0], bary[1], bary[2]});
      if (score > best_score) {
        best_score = score;
        best = Hit{t, bary};
      }
    }
  };
  scan(ix, iy);
  if (best_score >= 0.0) return best;
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      if (dx != 0 || dy != 0) scan(ix + dx, iy + dy);
    }
  }
  if (!best) return std::nullopt;
  if (best_score >= 0.0) return best;
  // Distance outside the best triangle, in length units.
  const double outside = -best_score * 2.0 * std::abs(mesh_->triangle_area(best->triangle)) /
                         mesh_->triangle_diameter(best->triangle);
  if (outside > tol) return std::nullopt;
  auto& bary = best->bary;
  for (double& l : bary) l = std::max(l, 0.0);
  const double sum = bary[0] + bary[1] + bary[2];
  for (double& l : bary) l /= sum;
  return best;
}

double PointLocator::interpolate(const std::vector<double>& nodal, const Hit& hit) const {
  const auto& tri = mesh_->triangles[hit.triangle];
  return hit.bary[0] * nodal[tri[0]] + hit.bary[1] * nodal[tri[1]] + hit.bary[2] * nodal[tri[2]];
}

}  // namespace capwedge
