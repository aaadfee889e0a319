#include <doctest.h>

#include "capwedge/comparison.hpp"
#include "scenarios.hpp"

using namespace capwedge;
using namespace capwedge::testing;
using doctest::Approx;

namespace {

struct CapRun {
  WedgeDomain domain = build_wedge(kPi / 2, 1.0);
  ScalarField field;
  MuFamily family{};
  TorusBarrier upper, lower;

  explicit CapRun(double h) {
    field = solve(domain, mesh_ptr(domain, h), MeanCurvatureSpec::constant(-0.5), cap_bc());
    const double M2 = empirical_bounds(field, MeanCurvatureSpec::constant(-0.5)).M2;
    family = mu_family(domain, kPi / 2, kPi / 8, M2);
    upper = make_barrier(BarrierSign::Plus, kPi / 2, family.beta, M2);
    lower = make_barrier(BarrierSign::Minus, kPi / 2, family.beta, M2);
  }
};

const auto right_angle = [](double) { return kPi / 2; };

}  // namespace

TEST_CASE("Courant-Lebesgue band") {
  CHECK(p_of_delta(1.0, std::exp(-1.0)) == Approx(5.013256549).epsilon(1e-10));
  for (double delta : {0.01, 0.3, 0.9}) CHECK(p_of_delta(std::log(1 / delta) / (8 * kPi), delta) == Approx(1.0));
  CHECK(code_of([] { p_of_delta(1.0, 1.0); }) == ErrorCode::DeltaOutOfRange);
  CHECK(code_of([] { p_of_delta(1.0, 0.0); }) == ErrorCode::DeltaOutOfRange);
  CHECK(code_of([] { p_of_delta(0.0, 0.5); }) == ErrorCode::OutOfRange);
}

TEST_CASE("property: band grows with delta") {
  Gen gen(61);
  for (int k = 0; k < 2000; ++k) {
    const double M0 = gen.log_uniform(1e-3, 1e3);
    double d1 = gen.uniform(1e-9, 1 - 1e-9), d2 = gen.uniform(1e-9, 1 - 1e-9);
    if (d1 == d2) continue;
    if (d1 > d2) std::swap(d1, d2);
    CHECK(p_of_delta(M0, d1) < p_of_delta(M0, d2));
  }
}

TEST_CASE("oscillation on circles") {
  const WedgeDomain half = build_wedge(kPi / 2, 1.0);
  auto m = mesh_ptr(half, 0.05);
  const ScalarField tilt_field = nodal_field(m, [](Vec2 p) { return p.x; });
  const FieldProbe tilt(half, tilt_field);
  CHECK(oscillation_on_circle(tilt, 0.5) == Approx(0.5).epsilon(1e-6));
  const CircleSamples s = sample_circle(tilt, 0.5);
  CHECK(s.theta.size() == 720);
  CHECK(s.theta.front() == Approx(-kPi / 2));
  CHECK(s.theta.back() == Approx(kPi / 2));

  const ScalarField exact_cap = nodal_field(mesh_ptr(half, 0.04), cap_height);
  CHECK(oscillation_on_circle(FieldProbe(half, exact_cap), 0.05) <= 1e-6);

  CHECK(code_of([&] { oscillation_on_circle(tilt, 1.5); }) == ErrorCode::OutOfRange);
  const ScalarField coarse = nodal_field(mesh_ptr(half, 0.3, 0.0), [](Vec2) { return 0.0; });
  CHECK(code_of([&] { oscillation_on_circle(FieldProbe(half, coarse), 0.1); }) == ErrorCode::BelowResolution);
}

TEST_CASE("solved cap is radial to 1e-6 near the corner") {
  const WedgeDomain d = build_wedge(kPi / 2, 1.0);
  const ScalarField cap = solve(d, mesh_ptr(d, 0.02), MeanCurvatureSpec::constant(-0.5), cap_bc());
  const FieldProbe p(d, cap);
  CHECK(oscillation_on_circle(p, 0.005) <= 1e-6);
  double prev = oscillation_on_circle(p, 0.2);
  for (double r : {0.1, 0.05, 0.025, 0.0125}) {
    const double osc = oscillation_on_circle(p, r);
    CHECK(osc <= prev);
    prev = osc;
  }
}

TEST_CASE("tanh-jump oscillation shrinks along the dyadic sweep") {
  const WedgeDomain d = build_wedge(kPi / 2, 1.0);
  const ScalarField f = solve(d, mesh_ptr(d, 0.1), MeanCurvatureSpec::constant(0.0), tanh_jump_bc(0.05, kPi / 2),
                              patient());
  const FieldProbe p(d, f);
  double prev = oscillation_on_circle(p, 0.2);
  for (double r : {0.1, 0.05, 0.025}) {
    const double osc = oscillation_on_circle(p, r);
    CHECK(osc < prev);
    prev = osc;
  }

  const double M2 = empirical_bounds(f, MeanCurvatureSpec::constant(0.0)).M2;
  const MuFamily fam = mu_family(d, kPi / 2, kPi / 8, M2);
  const Region region = footprint_region(d, make_barrier(BarrierSign::Plus, kPi / 2, fam.beta, M2));
  double wprev = uniform_continuity_probe(f, region, 0.2);
  for (double dist : {0.1, 0.05, 0.025}) {
    const double w = uniform_continuity_probe(f, region, dist);
    CHECK(w <= wprev);
    wprev = w;
  }
}

TEST_CASE("sandwich on the cap") {
  const CapRun run(0.04);
  const FieldProbe p(run.domain, run.field);
  const SandwichReport s =
      sandwich_check(p, run.family, run.upper, run.lower, right_angle, 0.05, graph_area(run.field));
  CHECK(s.valid);
  CHECK_FALSE(s.vacuous_band);
  CHECK(s.min_gap_lower > 0.0);
  CHECK(s.min_gap_upper > 0.0);
  CHECK(s.radius == Approx(std::sqrt(0.05)));
  CHECK(norm(s.w) == Approx(s.radius).epsilon(1e-9));
  CHECK_FALSE(s.region.empty());
  for (const auto& pt : s.region) {
    CHECK(pt.lower < pt.f);
    CHECK(pt.f < pt.upper);
    CHECK(norm(pt.x) <= s.radius + 1e-12);
  }

  const TorusBarrier other = make_barrier(BarrierSign::Plus, kPi / 2, run.family.beta - 0.1, run.upper.M2);
  CHECK(code_of([&] { sandwich_check(p, run.family, other, run.lower, right_angle, 0.05, 1.0); }) ==
        ErrorCode::PreconditionsUnmet);
  auto steep = [](double) { return 0.1; };
  CHECK(code_of([&] { sandwich_check(p, run.family, run.upper, run.lower, steep, 0.05, 1.0); }) ==
        ErrorCode::PreconditionsUnmet);
}

TEST_CASE("sandwich on constant fields") {
  const WedgeDomain d = build_wedge(kPi / 2, 1.0);
  auto m = mesh_ptr(d, 0.1);
  const MuFamily fam = mu_family(d, kPi / 2, kPi / 8, 0.0);
  const TorusBarrier up = make_barrier(BarrierSign::Plus, kPi / 2, fam.beta, 0.0);
  const TorusBarrier lo = make_barrier(BarrierSign::Minus, kPi / 2, fam.beta, 0.0);

  const ScalarField big = nodal_field(m, [](Vec2) { return 10.0; });
  const SandwichReport a = sandwich_check(FieldProbe(d, big), fam, up, lo, right_angle, 0.05, graph_area(big));
  CHECK(a.valid);
  CHECK_FALSE(a.vacuous_band);
  CHECK(a.min_gap_lower == Approx(a.p_delta - 0.0).epsilon(0.5));

  const ScalarField small = nodal_field(m, [](Vec2) { return 0.1; });
  const SandwichReport b = sandwich_check(FieldProbe(d, small), fam, up, lo, right_angle, 0.05, graph_area(small));
  CHECK(b.valid);
  CHECK(b.vacuous_band);
  CHECK(b.p_delta >= 2 * b.M1);
}

TEST_CASE("uniform continuity probe") {
  const WedgeDomain d = build_wedge(kPi / 3, 1.0);
  auto m = mesh_ptr(d, 0.05);
  const Region all = [&d](Vec2 p) { return d.contains(p); };
  CHECK(uniform_continuity_probe(nodal_field(m, [](Vec2) { return 2.0; }), all, 0.1) == 0.0);
  const ScalarField lin = nodal_field(m, [](Vec2 p) { return p.x; });
  for (double dist : {0.2, 0.05, 0.01}) CHECK(uniform_continuity_probe(lin, all, dist) <= dist + 1e-9);
}

TEST_CASE("property: empirical modulus is nondecreasing in d") {
  Gen gen(62);
  const WedgeDomain d = build_wedge(1.0, 1.0);
  auto m = mesh_ptr(d, 0.08);
  const Region all = [&d](Vec2 p) { return d.contains(p); };
  for (int k = 0; k < 10; ++k) {
    const double a = gen.uniform(-5, 5), b = gen.uniform(-5, 5), c = gen.uniform(1, 20);
    const ScalarField f = nodal_field(m, [=](Vec2 p) { return std::sin(a * p.x + b * p.y) + std::tanh(c * p.y); });
    std::vector<double> ds;
    for (int i = 0; i < 8; ++i) ds.push_back(gen.uniform(0.01, 0.5));
    std::sort(ds.begin(), ds.end());
    double prev = 0.0;
    for (double dist : ds) {
      const double w = uniform_continuity_probe(f, all, dist);
      CHECK(w >= prev);
      prev = w;
    }
  }
}
