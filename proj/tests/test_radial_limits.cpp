#include <doctest.h>

#include "scenarios.hpp"

using namespace capwedge;
using namespace capwedge::testing;
using doctest::Approx;

namespace {

RadialProfile synthetic(const std::vector<double>& thetas, const std::function<double(double)>& rf) {
  RadialProfile p;
  p.theta_grid = thetas;
  for (double t : thetas) {
    p.limits.push_back(rf(t));
    p.errors.push_back(0.0);
    p.fit_exponents.emplace_back();
  }
  return p;
}

std::vector<double> uniform_grid(double alpha, int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(-alpha + (i + 0.5) * 2 * alpha / n);
  return t;
}

LimitFit exact_side(double v) { return LimitFit{v, 0.0, std::nullopt, 0.0}; }

double smoothstep(double s) { return s * s * (3 - 2 * s); }

// Fit error bars carry no discretization error, so refinement is measured
// against the classification tolerance built from the same two meshes.
double max_limit_shift(const WedgeDomain& d, const ClassifiedRun& run) {
  const FieldProbe probe(d, run.coarse);
  const RadialProfile coarse = radial_profile(probe, run.profile.theta_grid, run.profile.radii);
  double shift = 0.0;
  for (std::size_t i = 0; i < coarse.limits.size(); ++i) {
    shift = std::max(shift, std::abs(coarse.limits[i] - run.profile.limits[i]));
  }
  return shift;
}

}  // namespace

TEST_CASE("ray sampling") {
  const WedgeDomain d = build_wedge(kPi / 2, 1.0);
  auto m = mesh_ptr(d, 0.1);
  const ScalarField c = nodal_field(m, [](Vec2) { return 1.5; });
  const FieldProbe pc(d, c);
  for (double v : sample_ray(pc, 0.3, default_radii(d))) CHECK(v == Approx(1.5));

  const ScalarField lin = nodal_field(m, [](Vec2 p) { return p.x; });
  const FieldProbe pl(d, lin);
  const auto v = sample_ray(pl, 0.0, {0.4, 0.2, 0.1});
  CHECK(std::abs(v[0] - 0.4) <= 0.01);
  CHECK(std::abs(v[1] - 0.2) <= 0.01);
  CHECK(std::abs(v[2] - 0.1) <= 0.01);

  CHECK(code_of([&] { sample_ray(pc, kPi / 2 + 0.1, {0.4, 0.2}); }) == ErrorCode::RayOutsideDomain);
  CHECK(code_of([&] { sample_ray(pc, 0.0, {0.2, 0.4}); }) == ErrorCode::OutOfRange);

  const ScalarField coarse = nodal_field(mesh_ptr(d, 0.2, 0.0), [](Vec2) { return 0.0; });
  const FieldProbe pu(d, coarse);
  CHECK(code_of([&] { sample_ray(pu, 0.0, {0.5, 0.1}); }) == ErrorCode::BelowResolution);
}

TEST_CASE("limit fits on synthetic sequences") {
  const auto radii = default_radii(build_wedge(kPi / 2, 1.0));
  std::vector<double> a, b, c;
  for (double r : radii) {
    a.push_back(2 + r);
    b.push_back(5.0);
    c.push_back(1 + std::sqrt(r));
  }
  const LimitFit fa = estimate_limit(a, radii);
  CHECK(std::abs(fa.limit - 2.0) <= 1e-8);
  REQUIRE(fa.exponent);
  CHECK(*fa.exponent == Approx(1.0).epsilon(1e-4));

  const LimitFit fb = estimate_limit(b, radii);
  CHECK(fb.limit == 5.0);
  CHECK(fb.error_bar <= 1e-14);
  CHECK_FALSE(fb.exponent);

  const LimitFit fc = estimate_limit(c, radii);
  CHECK(std::abs(fc.limit - 1.0) <= 1e-6);
  REQUIRE(fc.exponent);
  CHECK(*fc.exponent == Approx(0.5).epsilon(1e-4));

  CHECK(code_of([&] { estimate_limit({1, 2, 3}, {0.4, 0.2, 0.1}); }) == ErrorCode::FitIllConditioned);
  CHECK(code_of([&] { estimate_limit({1, 2, 3, 4}, {0.4, 0.39, 0.38, 0.37}); }) == ErrorCode::FitIllConditioned);
}

TEST_CASE("property: power-law sequences recover limit and rate") {
  Gen gen(51);
  const auto radii = default_radii(build_wedge(1.0, 1.0));
  for (int k = 0; k < 300; ++k) {
    const double L = gen.uniform(-5, 5), c = gen.uniform(-3, 3), p = gen.uniform(0.3, 2.5);
    if (std::abs(c) < 0.05) continue;
    std::vector<double> v;
    for (double r : radii) v.push_back(L + c * std::pow(r, p));
    const LimitFit f = estimate_limit(v, radii);
    CHECK(std::abs(f.limit - L) <= 1e-6 * (1 + std::abs(c)));
    REQUIRE(f.exponent);
    CHECK(*f.exponent == Approx(p).epsilon(1e-3));
    CHECK(f.error_bar >= 0.5 * std::abs(v.back() - f.limit) - 1e-15);
  }
}

TEST_CASE("side limits") {
  const WedgeDomain half = build_wedge(kPi / 2, 1.0);
  auto m = mesh_ptr(half, 0.1);
  const ScalarField c = nodal_field(m, [](Vec2) { return -0.25; });
  const FieldProbe pc(half, c);
  CHECK(side_limit(pc, Side::Minus, default_radii(half)).limit == Approx(-0.25));
  CHECK(code_of([&] { side_limit(pc, Side::Plus, default_radii(half)); }) == ErrorCode::PreconditionsUnmet);

  const ScalarField tilt = nodal_field(m, [](Vec2 p) { return p.x; });
  const FieldProbe pt(half, tilt);
  CHECK(std::abs(side_limit(pt, Side::Minus, default_radii(half)).limit) <= 1e-6);

  const WedgeDomain d = build_wedge(kPi / 3, 1.0);
  const ScalarField cap = solve(d, mesh_ptr(d, 0.05), MeanCurvatureSpec::constant(-0.5), cap_bc());
  const FieldProbe pcap(d, cap);
  CHECK(std::abs(side_limit(pcap, Side::Minus, default_radii(d)).limit - 2.0) <= 2e-3);
}

TEST_CASE("classification of synthetic profiles") {
  const auto grid = uniform_grid(kPi / 2, 157);
  SUBCASE("constant") {
    const Classification c = classify(synthetic(grid, [](double) { return 2.0; }), exact_side(2.0), 1e-3);
    CHECK(std::holds_alternative<ConstantAll>(c.kind));
    CHECK(kind_name(c) == "ConstantAll");
  }
  SUBCASE("fan") {
    auto rf = [](double t) { return t <= -0.3 ? 0.0 : t >= 0.4 ? 1.0 : smoothstep((t + 0.3) / 0.7); };
    const Classification c = classify(synthetic(grid, rf), exact_side(0.0), 1e-3);
    REQUIRE(std::holds_alternative<Fan>(c.kind));
    const Fan f = std::get<Fan>(c.kind);
    const double step = grid[1] - grid[0];
    CHECK(std::abs(f.alpha1 - (-0.3)) <= 2 * step);
    CHECK(std::abs(f.alpha2 - 0.4) <= 2 * step);
    CHECK(f.direction == FanDirection::Increasing);
  }
  SUBCASE("interior bump") {
    auto rf = [](double t) { return t < -0.3 ? 0.0 : t > 0.4 ? 1.0 : (t + 0.3) / 0.7 + 0.5 * std::exp(-100 * t * t); };
    const Classification c = classify(synthetic(grid, rf), exact_side(0.0), 1e-3);
    CHECK(std::holds_alternative<Unclassified>(c.kind));
  }
  SUBCASE("mismatch with the side limit") {
    const Classification c = classify(synthetic(grid, [](double) { return 2.0; }), exact_side(2.1), 1e-3);
    CHECK(std::holds_alternative<Unclassified>(c.kind));
    CHECK(c.side_mismatch == Approx(0.1));
  }
  SUBCASE("noisy error bars") {
    RadialProfile p = synthetic(grid, [](double) { return 2.0; });
    for (std::size_t i = 0; i < p.errors.size(); i += 5) p.errors[i] = 1e-3;
    CHECK(code_of([&] { classify(p, exact_side(2.0), 1e-3); }) == ErrorCode::NoisyProfile);
  }
}

TEST_CASE("property: random monotone fans are recovered with one-signed steps") {
  Gen gen(52);
  for (int k = 0; k < 400; ++k) {
    const double alpha = gen.uniform(0.5, 1.6);
    const int n = gen.integer(24, 80);
    const auto grid = uniform_grid(alpha, n);
    const double step = grid[1] - grid[0];
    const double a = gen.uniform(-alpha + 2 * step, alpha - 8 * step);
    const double b = gen.uniform(a + 5 * step, alpha - 2 * step);
    const double lo = gen.uniform(-2, 2);
    const double jump = gen.uniform(0.2, 2.0) * (gen.integer(0, 1) ? 1 : -1);
    auto rf = [&](double t) { return t <= a ? lo : t >= b ? lo + jump : lo + jump * (t - a) / (b - a); };
    const double tol = 1e-3 * std::abs(jump);
    const Classification c = classify(synthetic(grid, rf), exact_side(lo), tol);
    REQUIRE(std::holds_alternative<Fan>(c.kind));
    const Fan f = std::get<Fan>(c.kind);
    CHECK(f.alpha1 < f.alpha2);
    CHECK(f.alpha1 >= -alpha);
    CHECK(f.alpha2 <= alpha);
    CHECK(std::abs(f.alpha1 - a) <= step);
    CHECK(std::abs(f.alpha2 - b) <= step);
    CHECK((f.direction == FanDirection::Increasing) == (jump > 0));
    const double sign = jump > 0 ? 1.0 : -1.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (grid[i - 1] < f.alpha1 || grid[i] > f.alpha2) continue;
      const double diff = sign * (rf(grid[i]) - rf(grid[i - 1]));
      if (grid[i - 1] > a && grid[i] < b) CHECK(diff > tol / 2);
      CHECK(diff >= 0.0);
    }
  }
}

TEST_CASE("property: profiles within tolerance of a constant are ConstantAll") {
  Gen gen(53);
  for (int k = 0; k < 300; ++k) {
    const auto grid = uniform_grid(gen.uniform(0.3, 1.5), gen.integer(8, 60));
    const double c = gen.uniform(-3, 3), tol = gen.log_uniform(1e-6, 1e-2);
    RadialProfile p = synthetic(grid, [&](double) { return c; });
    for (auto& v : p.limits) v += gen.uniform(0.0, tol) / grid.size();
    CHECK(std::holds_alternative<ConstantAll>(classify(p, exact_side(p.limits.front()), tol).kind));
  }
}

TEST_CASE("property: solved caps and fans classify and limits are stable under refinement") {
  SUBCASE("cap") {
    const WedgeDomain d = build_wedge(kPi / 3, 1.0);
    const ClassifiedRun run = classified_run(d, 0.08, MeanCurvatureSpec::constant(-0.5), cap_bc());
    CHECK(std::holds_alternative<ConstantAll>(run.result.kind));
    CHECK(run.result.side_mismatch <= run.tol);
    CHECK(max_limit_shift(d, run) <= run.tol);
  }
  SUBCASE("fans for several contact angles") {
    const WedgeDomain d = build_wedge(kPi / 2, 1.0);
    for (double frac : {0.3, 0.5, 0.7}) {
      CAPTURE(frac);
      const ClassifiedRun run = classified_run(d, 0.1, MeanCurvatureSpec::constant(0.0), tanh_jump_bc(0.05, frac * kPi));
      CHECK(check_theorem1(kPi / 2, frac * kPi).condition1.verdict == Verdict::Holds);
      CHECK_FALSE(std::holds_alternative<Unclassified>(run.result.kind));
      CHECK(run.result.side_mismatch <= run.tol);
      CHECK(max_limit_shift(d, run) <= run.tol);
    }
  }
}
