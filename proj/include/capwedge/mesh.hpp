#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "capwedge/geometry.hpp"

namespace capwedge {

enum class BoundaryTag { SidePlus, SideMinus, OuterArc };

const char* to_string(BoundaryTag tag);

struct BoundaryEdge {
  int v0;
  int v1;
  BoundaryTag tag;
};

/// Triangulation of a wedge domain. Triangles are counterclockwise.
/// Boundary edges are oriented so the domain lies to their left.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary;
  double grading{0.0};
  double h_max{0.0};
  int corner_vertex{-1};

  double triangle_area(int t) const;
  /// Longest edge of triangle t.
  double triangle_diameter(int t) const;
};

struct MeshAudit {
  double min_angle_deg{0.0};
  double max_angle_deg{0.0};
  bool tags_partition{false};   // every boundary edge tagged exactly once, no untagged boundary edge
  bool closed_polygon{false};   // tagged edges form one closed loop
  double nearest_to_corner{0.0};
  double total_area{0.0};
};

/// Element size target at radius r: h_max * (max(r, r_floor) / delta_star)^g.
double target_edge_length(double r, double h_max, double grading, double delta_star);

/// Ring-based graded triangulation with the corner as a vertex.
/// Throws TooCoarse or QualityFailure.
Mesh generate_mesh(const WedgeDomain& domain, double h_max, double grading);

MeshAudit audit_mesh(const Mesh& mesh);

/// One record per line: "v x y", "t a b c", "e a b TAG".
void write_mesh(std::ostream& out, const Mesh& mesh);

/// Point location by uniform bucket grid.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);

  struct Hit {
    int triangle;
    std::array<double, 3> bary;
  };

  /// Finds the containing triangle; points within `tol` (absolute) outside the
  /// mesh snap to the closest triangle in their bucket neighbourhood.
  std::optional<Hit> locate(Vec2 p, double tol = 1e-10) const;
  double interpolate(const std::vector<double>& nodal, const Hit& hit) const;

  const Mesh& mesh() const { return *mesh_; }

 private:
  std::array<double, 3> barycentric(int t, Vec2 p) const;

  const Mesh* mesh_;
  Vec2 lo_{};
  double cell_{1.0};
  int nx_{1};
  int ny_{1};
  std::vector<std::vector<int>> buckets_;
};

}  // namespace capwedge
