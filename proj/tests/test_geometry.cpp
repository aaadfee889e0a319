#include <doctest.h>

#include <sstream>

#include "support.hpp"

using namespace capwedge;
using namespace capwedge::testing;
using doctest::Approx;

TEST_CASE("half-disk wedge") {
  const WedgeDomain d = build_wedge(kPi / 2, 1.0);
  CHECK(d.straight());
  CHECK(d.contains({0.5, 0.0}));
  CHECK(d.contains({0.0, 0.9}));
  CHECK_FALSE(d.contains({-0.1, 0.0}));
  CHECK_FALSE(d.contains({0.8, 0.8}));
  CHECK(d.area() == Approx(kPi / 2).epsilon(1e-12));
}

TEST_CASE("sixty degree sector") {
  const WedgeDomain d = build_wedge(kPi / 6, 1.0);
  CHECK(d.wall_angle(Side::Plus, 0.5) == Approx(kPi / 6));
  CHECK(d.wall_angle(Side::Minus, 0.5) == Approx(-kPi / 6));
  CHECK(d.contains(from_polar(0.9, 0.5)));
  CHECK_FALSE(d.contains(from_polar(0.9, 0.55)));
}

TEST_CASE("curved arcs stay tangent at the corner") {
  const WedgeDomain d = build_wedge(kPi / 3, 1.0, ArcSpec({0.0, 0.1}), ArcSpec({0.0, 0.1}));
  CHECK_FALSE(d.straight());
  const double r = 1e-6;
  for (Side side : {Side::Plus, Side::Minus}) {
    const Vec2 a = d.wall_point(side, r);
    const Vec2 b = d.wall_point(side, 2 * r);
    const double tangent = std::atan2(b.y - a.y, b.x - a.x);
    CHECK(std::abs(tangent - (side == Side::Plus ? kPi / 3 : -kPi / 3)) <= 1e-6);
  }
}

TEST_CASE("wedge validation") {
  CHECK(code_of([] { build_wedge(0.0, 1.0); }) == ErrorCode::InvalidAngle);
  CHECK(code_of([] { build_wedge(kPi, 1.0); }) == ErrorCode::InvalidAngle);
  CHECK(code_of([] { build_wedge(kPi / 4, 0.0); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { build_wedge(0.2, 1.0, ArcSpec({0.0, -0.5}), ArcSpec({0.0, 0.5})); }) == ErrorCode::ArcsCross);
  CHECK(code_of([] { build_wedge(0.5, 1.0, ArcSpec({0.1})); }) == ErrorCode::InvalidArc);
}

TEST_CASE("exterior normals") {
  const auto n1 = exterior_normal(build_wedge(kPi / 6, 1.0), Side::Plus, 0.3);
  CHECK(n1.x == Approx(-0.5));
  CHECK(n1.y == Approx(std::sqrt(3.0) / 2));
  const auto n2 = exterior_normal(build_wedge(kPi / 2, 1.0), Side::Plus, 0.7);
  CHECK(n2.x == Approx(-1.0));
  CHECK(n2.y == Approx(0.0).epsilon(1e-12));
  const auto n3 = exterior_normal(build_wedge(kPi / 3, 1.0), Side::Minus, 0.2);
  CHECK(n3.x == Approx(-std::sqrt(3.0) / 2));
  CHECK(n3.y == Approx(-0.5));
}

TEST_CASE("property: straight-wall normals are unit and orthogonal to the wall") {
  Gen gen(11);
  for (int k = 0; k < 500; ++k) {
    const WedgeDomain d = build_wedge(gen.uniform(0.05, kPi - 0.05), gen.uniform(0.1, 5.0));
    const Side side = gen.integer(0, 1) ? Side::Plus : Side::Minus;
    const double s = gen.uniform(0.0, d.delta_star());
    const Vec2 n = exterior_normal(d, side, s);
    const Vec2 toward_corner = -d.wall_tangent(side, d.radius_at_arclength(side, s));
    CHECK(std::abs(norm(n) - 1.0) <= 1e-12);
    CHECK(std::abs(dot(n, toward_corner)) <= 1e-12);
  }
}

TEST_CASE("polar coordinates") {
  const Polar o = polar_of({0.0, 0.0});
  CHECK(o.r == 0.0);
  CHECK(o.theta == 0.0);
  const Polar a = polar_of({1.0, 1.0});
  CHECK(a.r == Approx(std::sqrt(2.0)));
  CHECK(a.theta == Approx(kPi / 4));
  const Polar b = polar_of({-1.0, 0.0});
  CHECK(b.r == Approx(1.0));
  CHECK(b.theta == Approx(kPi));
}

TEST_CASE("property: polar_of inverts from_polar") {
  Gen gen(12);
  for (int k = 0; k < 2000; ++k) {
    const double r = gen.log_uniform(1e-6, 1e3);
    const double t = gen.uniform(-kPi + 1e-9, kPi);
    const Polar p = polar_of(from_polar(r, t));
    CHECK(std::abs(p.r - r) <= 1e-12 * r);
    CHECK(std::abs(p.theta - t) <= 1e-12);
  }
}

TEST_CASE("half-disk mesh passes the audit") {
  const Mesh m = generate_mesh(build_wedge(kPi / 2, 1.0), 0.1, 1.0);
  const MeshAudit a = audit_mesh(m);
  CHECK(a.min_angle_deg >= 20.0);
  CHECK(a.tags_partition);
  CHECK(a.closed_polygon);
  CHECK(a.total_area == Approx(kPi / 2).epsilon(2e-3));
  CHECK(m.corner_vertex >= 0);
}

TEST_CASE("graded mesh reaches the corner") {
  const Mesh m = generate_mesh(build_wedge(kPi / 6, 1.0), 0.05, 1.5);
  const MeshAudit a = audit_mesh(m);
  CHECK(a.nearest_to_corner <= 1e-3);
  CHECK(a.min_angle_deg >= 20.0);
  CHECK(a.closed_polygon);
}

TEST_CASE("too coarse") {
  CHECK(code_of([] { generate_mesh(build_wedge(kPi / 2, 1.0), 2.0, 1.0); }) == ErrorCode::TooCoarse);
}

TEST_CASE("target edge length") {
  CHECK(target_edge_length(0.5, 0.1, 1.0, 1.0) == Approx(0.05));
  CHECK(target_edge_length(0.0, 0.1, 1.0, 1.0) == Approx(0.1 * 1e-4));
  CHECK(target_edge_length(0.3, 0.1, 0.0, 1.0) == Approx(0.1));
}

TEST_CASE("property: random wedges mesh cleanly") {
  Gen gen(13);
  for (int k = 0; k < 12; ++k) {
    const double alpha = gen.uniform(0.2, 2.8);
    const double off = gen.uniform(-0.05, 0.05);
    const WedgeDomain d = build_wedge(alpha, 1.0, ArcSpec({0.0, off}), ArcSpec({0.0, -off}));
    const Mesh m = generate_mesh(d, 0.15, 1.0);
    const MeshAudit a = audit_mesh(m);
    CHECK(a.min_angle_deg >= 20.0);
    CHECK(a.tags_partition);
    CHECK(a.closed_polygon);
    CHECK(a.total_area == Approx(d.area()).epsilon(2e-2));
  }
}

TEST_CASE("point locator interpolates linear data exactly") {
  auto m = mesh_ptr(build_wedge(kPi / 3, 1.0), 0.1);
  const ScalarField f = nodal_field(m, [](Vec2 p) { return 2 * p.x - 3 * p.y + 1; });
  const PointLocator loc(*m);
  Gen gen(14);
  for (int k = 0; k < 300; ++k) {
    const Vec2 p = from_polar(gen.uniform(0.01, 0.99), gen.uniform(-kPi / 3, kPi / 3) * 0.99);
    const auto hit = loc.locate(p);
    REQUIRE(hit);
    CHECK(loc.interpolate(f.values, *hit) == Approx(2 * p.x - 3 * p.y + 1).epsilon(1e-10));
  }
  CHECK_FALSE(loc.locate({-0.5, 0.0}));
}

TEST_CASE("mesh text output") {
  const Mesh m = generate_mesh(build_wedge(kPi / 2, 1.0), 0.5, 1.0);
  std::ostringstream out;
  write_mesh(out, m);
  const std::string s = out.str();
  CHECK(s.find("v ") == 0);
  CHECK(s.find("\ne ") != std::string::npos);
}
