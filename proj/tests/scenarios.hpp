#pragma once

#include <cmath>

#include "capwedge/conditions.hpp"
#include "capwedge/radial_limits.hpp"
#include "support.hpp"

namespace capwedge::testing {

// Radii (delta*/16) 2^-k, k = 0..8: the fit sits in its asymptotic range there.
inline std::vector<double> corner_radii(const WedgeDomain& d) {
  std::vector<double> r;
  for (int k = 0; k <= 8; ++k) r.push_back(d.delta_star() / 16 * std::ldexp(1.0, -k));
  return r;
}

// Minimal surface on the half-disk, Dirichlet tanh(theta / eps) on SidePlus and
// the outer arc, contact angle gamma2 on SideMinus.
inline BoundarySpec tanh_jump_bc(double eps, double gamma2) {
  BoundarySpec bc;
  auto phi = [eps](Vec2 p) { return std::tanh(std::atan2(p.y, p.x) / eps); };
  bc.side_plus = Dirichlet{phi};
  bc.outer_arc = Dirichlet{phi};
  bc.side_minus = Capillary{[gamma2](double) { return gamma2; }};
  return bc;
}

inline SolverOptions patient() {
  SolverOptions o;
  o.max_iter = 200;
  return o;
}

struct ClassifiedRun {
  ScalarField coarse;
  ScalarField fine;
  RadialProfile profile;
  LimitFit z2;
  double tol;
  Classification result;
};

// Solves at h and h/2, takes the tolerance from the change between them and
// classifies the fine profile.
inline ClassifiedRun classified_run(const WedgeDomain& d, double h, const MeanCurvatureSpec& H,
                                    const BoundarySpec& bc, int rays = 24) {
  ClassifiedRun run{solve(d, mesh_ptr(d, h), H, bc, patient()), solve(d, mesh_ptr(d, h / 2), H, bc, patient()), {}, {},
                    0.0, {}};
  const auto radii = corner_radii(d);
  const auto thetas = default_theta_grid(d, rays);
  const FieldProbe coarse_probe(d, run.coarse);
  const FieldProbe fine_probe(d, run.fine);
  const RadialProfile coarse = radial_profile(coarse_probe, thetas, radii);
  run.profile = radial_profile(fine_probe, thetas, radii);
  run.z2 = side_limit(fine_probe, Side::Minus, radii);
  run.tol = default_tolerance(coarse, run.profile);
  run.result = classify(run.profile, run.z2, run.tol);
  return run;
}

}  // namespace capwedge::testing
