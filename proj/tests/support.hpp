#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>

#include "capwedge/geometry.hpp"
#include "capwedge/mesh.hpp"
#include "capwedge/pmc_solver.hpp"

namespace capwedge::testing {

// Fixed-seed source for the hand-rolled property generators.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  Vec2 unit() {
    const double t = uniform(-kPi, kPi);
    return {std::cos(t), std::sin(t)};
  }

 private:
  std::mt19937_64 rng_;
};

inline ScalarField nodal_field(std::shared_ptr<const Mesh> mesh, const std::function<double(Vec2)>& f) {
  ScalarField out;
  out.values.reserve(mesh->vertices.size());
  for (const Vec2& v : mesh->vertices) out.values.push_back(f(v));
  out.mesh = std::move(mesh);
  return out;
}

inline std::shared_ptr<const Mesh> mesh_ptr(const WedgeDomain& d, double h, double g = 1.0) {
  return std::make_shared<const Mesh>(generate_mesh(d, h, g));
}

inline BoundarySpec cap_bc() {
  BoundarySpec bc;
  bc.side_plus = Capillary{[](double) { return kPi / 2; }};
  bc.side_minus = Capillary{[](double) { return kPi / 2; }};
  bc.outer_arc = Dirichlet{[](Vec2) { return std::sqrt(3.0); }};
  return bc;
}

inline double cap_height(Vec2 p) { return std::sqrt(4.0 - dot(p, p)); }

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  throw std::runtime_error("no capwedge::Error thrown");
}

}  // namespace capwedge::testing
