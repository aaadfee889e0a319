#include "capwedge/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "capwedge/error.hpp"

namespace capwedge {
namespace {

constexpr double kMinAngleDeg = 20.0;
constexpr double kDeg = kPi / 180.0;

double corner_angle(Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 u = b - a;
  const Vec2 v = c - a;
  return std::atan2(std::abs(cross(u, v)), dot(u, v));
}

double min_angle(Vec2 a, Vec2 b, Vec2 c) {
  return std::min({corner_angle(a, b, c), corner_angle(b, c, a), corner_angle(c, a, b)});
}

struct Ring {
  double r;
  std::vector<int> ids;
};

// Stitches two rings (outer has m+1 points, inner n+1) choosing at each step the
// candidate triangle with the larger minimum angle.
void zip_rings(const std::vector<Vec2>& xy, const Ring& outer, const Ring& inner,
               std::vector<std::array<int, 3>>& tris) {
  const std::size_t m = outer.ids.size() - 1;
  const std::size_t n = inner.ids.size() - 1;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < m || j < n) {
    bool advance_outer;
    if (i == m) {
      advance_outer = false;
    } else if (j == n) {
      advance_outer = true;
    } else {
      const double qa = min_angle(xy[outer.ids[i]], xy[outer.ids[i + 1]], xy[inner.ids[j]]);
      const double qb = min_angle(xy[outer.ids[i]], xy[inner.ids[j + 1]], xy[inner.ids[j]]);
      // Bias toward keeping both fronts at the same parametric position.
      const double ta = static_cast<double>(i + 1) / m;
      const double tb = static_cast<double>(j + 1) / n;
      if (std::abs(qa - qb) < 1e-9) {
        advance_outer = ta <= tb;
      } else {
        advance_outer = qa > qb;
      }
    }
    if (advance_outer) {
      tris.push_back({outer.ids[i], outer.ids[i + 1], inner.ids[j]});
      ++i;
    } else {
      tris.push_back({outer.ids[i], inner.ids[j + 1], inner.ids[j]});
      ++j;
    }
  }
}

void smooth_interior(Mesh& mesh, const std::vector<bool>& fixed, int passes) {
  std::vector<std::vector<int>> nbrs(mesh.vertices.size());
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      nbrs[t[k]].push_back(t[(k + 1) % 3]);
      nbrs[t[k]].push_back(t[(k + 2) % 3]);
    }
  }
  for (int p = 0; p < passes; ++p) {
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      if (fixed[v] || nbrs[v].empty()) continue;
      Vec2 acc{};
      for (int w : nbrs[v]) acc = acc + mesh.vertices[w];
      mesh.vertices[v] = acc / static_cast<double>(nbrs[v].size());
    }
  }
}

}  // namespace

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::SidePlus: return "SidePlus";
    case BoundaryTag::SideMinus: return "SideMinus";
    case BoundaryTag::OuterArc: return "OuterArc";
  }
  return "?";
}

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  return 0.5 * cross(vertices[tri[1]] - vertices[tri[0]], vertices[tri[2]] - vertices[tri[0]]);
}

double Mesh::triangle_diameter(int t) const {
  const auto& tri = triangles[t];
  return std::max({norm(vertices[tri[1]] - vertices[tri[0]]), norm(vertices[tri[2]] - vertices[tri[1]]),
                   norm(vertices[tri[0]] - vertices[tri[2]])});
}

double target_edge_length(double r, double h_max, double grading, double delta_star) {
  const double r_floor = h_max * 1e-3;
  return h_max * std::pow(std::max(r, r_floor) / delta_star, grading);
}

Mesh generate_mesh(const WedgeDomain& domain, double h_max, double grading) {
  const double ds = domain.delta_star();
  if (!(h_max > 0.0)) throw Error(ErrorCode::TooCoarse, "h_max must be positive");
  if (h_max >= ds) {
    std::ostringstream msg;
    msg << "h_max " << h_max << " >= delta_star " << ds;
    throw Error(ErrorCode::TooCoarse, msg.str());
  }
  if (!(grading >= 0.0)) throw Error(ErrorCode::OutOfRange, "grading exponent must be >= 0");

  auto width = [&](double r) {
    return domain.wall_angle(Side::Plus, r) - domain.wall_angle(Side::Minus, r);
  };
  // Angular resolution cap: beyond this count a ring is as fine as 4x the
  // scale-invariant (g = 1) mesh, which keeps g > 1 meshes finite.
  const int n_cap = 4 * std::max(1, static_cast<int>(std::ceil(width(ds) * ds / h_max)));

  Mesh mesh;
  mesh.grading = grading;
  mesh.h_max = h_max;
  std::vector<Ring> rings;

  auto add_ring = [&](double r, int n) {
    Ring ring{r, {}};
    const double lo = domain.wall_angle(Side::Minus, r);
    const double hi = domain.wall_angle(Side::Plus, r);
    for (int j = 0; j <= n; ++j) {
      const double th = (j == n) ? hi : lo + (hi - lo) * j / n;
      ring.ids.push_back(static_cast<int>(mesh.vertices.size()));
      mesh.vertices.push_back(from_polar(r, th));
    }
    rings.push_back(std::move(ring));
  };

  double r = ds;
  while (true) {
    const double w = width(r);
    const double h = std::max(target_edge_length(r, h_max, grading, ds), r * w / n_cap);
    int n = std::max(1, static_cast<int>(std::ceil(r * w / h)));
    const int fan_max = static_cast<int>(std::floor(w / (25.0 * kDeg)));
    const int fan_min = std::max(1, static_cast<int>(std::ceil(w / (120.0 * kDeg))));
    const bool last = n <= std::max(fan_max, fan_min);
    if (last) n = std::max(fan_min, std::min(n, std::max(fan_max, fan_min)));
    add_ring(r, n);
    if (last) break;
    r -= r * w / n;
    if (!(r > 0.0)) throw Error(ErrorCode::QualityFailure, "ring construction collapsed");
  }

  mesh.corner_vertex = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back({0.0, 0.0});

  for (std::size_t k = 0; k + 1 < rings.size(); ++k) zip_rings(mesh.vertices, rings[k], rings[k + 1], mesh.triangles);
  const Ring& inner = rings.back();
  for (std::size_t j = 0; j + 1 < inner.ids.size(); ++j) {
    mesh.triangles.push_back({mesh.corner_vertex, inner.ids[j], inner.ids[j + 1]});
  }

  // Boundary, counterclockwise: up the minus wall, along the outer arc, down the plus wall.
  std::vector<bool> fixed(mesh.vertices.size(), false);
  fixed[mesh.corner_vertex] = true;
  int prev = mesh.corner_vertex;
  for (auto it = rings.rbegin(); it != rings.rend(); ++it) {
    mesh.boundary.push_back({prev, it->ids.front(), BoundaryTag::SideMinus});
    prev = it->ids.front();
  }
  const Ring& outer = rings.front();
  for (std::size_t j = 0; j + 1 < outer.ids.size(); ++j) {
    mesh.boundary.push_back({outer.ids[j], outer.ids[j + 1], BoundaryTag::OuterArc});
  }
  prev = outer.ids.back();
  for (std::size_t k = 1; k < rings.size(); ++k) {
    mesh.boundary.push_back({prev, rings[k].ids.back(), BoundaryTag::SidePlus});
    prev = rings[k].ids.back();
  }
  mesh.boundary.push_back({prev, mesh.corner_vertex, BoundaryTag::SidePlus});
  for (const auto& e : mesh.boundary) fixed[e.v0] = fixed[e.v1] = true;

  for (const auto& t : mesh.triangles) {
    if (cross(mesh.vertices[t[1]] - mesh.vertices[t[0]], mesh.vertices[t[2]] - mesh.vertices[t[0]]) <= 0.0) {
      throw Error(ErrorCode::QualityFailure, "inverted triangle in ring stitching");
    }
  }

  for (int attempt = 0; attempt < 3; ++attempt) {
    if (audit_mesh(mesh).min_angle_deg >= kMinAngleDeg) return mesh;
    smooth_interior(mesh, fixed, 2);
  }
  const double worst = audit_mesh(mesh).min_angle_deg;
  if (worst < kMinAngleDeg) {
    std::ostringstream msg;
    msg << "minimum angle " << worst << " deg after smoothing";
    throw Error(ErrorCode::QualityFailure, msg.str());
  }
  return mesh;
}

MeshAudit audit_mesh(const Mesh& mesh) {
  MeshAudit audit;
  audit.min_angle_deg = 180.0;
  std::map<std::pair<int, int>, int> edge_count;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec2 a = mesh.vertices[tri[0]];
    const Vec2 b = mesh.vertices[tri[1]];
    const Vec2 c = mesh.vertices[tri[2]];
    for (double ang : {corner_angle(a, b, c), corner_angle(b, c, a), corner_angle(c, a, b)}) {
      audit.min_angle_deg = std::min(audit.min_angle_deg, ang / kDeg);
      audit.max_angle_deg = std::max(audit.max_angle_deg, ang / kDeg);
    }
    audit.total_area += mesh.triangle_area(static_cast<int>(t));
    for (int k = 0; k < 3; ++k) {
      const int u = tri[k];
      const int v = tri[(k + 1) % 3];
      ++edge_count[{std::min(u, v), std::max(u, v)}];
    }
  }

  std::map<std::pair<int, int>, int> tagged;
  for (const auto& e : mesh.boundary) ++tagged[{std::min(e.v0, e.v1), std::max(e.v0, e.v1)}];
  bool partition = true;
  for (const auto& [edge, count] : edge_count) {
    const bool is_boundary = count == 1;
    auto it = tagged.find(edge);
    const int tags = it == tagged.end() ? 0 : it->second;
    if (is_boundary != (tags == 1) || tags > 1) partition = false;
  }
  if (tagged.size() != mesh.boundary.size()) partition = false;
  audit.tags_partition = partition;

  // Closed loop: follow v0 -> v1 successors once around.
  std::map<int, int> next;
  bool closed = !mesh.boundary.empty();
  for (const auto& e : mesh.boundary) {
    if (!next.emplace(e.v0, e.v1).second) closed = false;
  }
  if (closed) {
    int v = mesh.boundary.front().v0;
    std::size_t steps = 0;
    do {
      auto it = next.find(v);
      if (it == next.end()) {
        closed = false;
        break;
      }
      v = it->second;
      ++steps;
    } while (v != mesh.boundary.front().v0 && steps <= mesh.boundary.size());
    closed = closed && steps == mesh.boundary.size();
  }
  audit.closed_polygon = closed;

  audit.nearest_to_corner = std::numeric_limits<double>::infinity();
  for (const Vec2& p : mesh.vertices) audit.nearest_to_corner = std::min(audit.nearest_to_corner, norm(p));
  return audit;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out.precision(17);
  for (const Vec2& p : mesh.vertices) out << "v " << p.x << ' ' << p.y << '\n';
  for (const auto& t : mesh.triangles) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary) out << "e " << e.v0 << ' ' << e.v1 << ' ' << to_string(e.tag) << '\n';
}

}  // namespace capwedge
