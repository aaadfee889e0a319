#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "capwedge/radial_limits.hpp"
#include "capwedge/torus.hpp"

namespace capwedge {

/// sqrt(8 pi M0 / ln(1/delta)). Throws DeltaOutOfRange outside (0, 1) and
/// OutOfRange for M0 <= 0.
double p_of_delta(double M0, double delta);

struct CircleSamples {
  std::vector<double> theta;
  std::vector<double> values;
  double oscillation{0.0};
};

/// f on 720 points of the circle |x| = r inside the domain, endpoints on the
/// walls. Throws BelowResolution when r is under 3 local mesh sizes and
/// OutOfRange for r outside (0, delta_star).
CircleSamples sample_circle(const FieldProbe& probe, double r, int samples = 720);
double oscillation_on_circle(const FieldProbe& probe, double r);

struct SandwichPoint {
  Vec2 x;
  double f;
  double lower;  // b-
  double upper;  // b+
};

struct SandwichReport {
  Vec2 w;
  double f_w{0.0};
  double p_delta{0.0};
  double radius{0.0};
  double M1{0.0};
  bool vacuous_band{false};
  std::vector<SandwichPoint> region;
  double min_gap_lower{0.0};  // min of f - b-
  double min_gap_upper{0.0};  // min of b+ - f
  bool valid{false};
};

/// Median-f point of the circle |x| = r.
Vec2 median_anchor(const FieldProbe& probe, double r);

/// Evaluates b+ = f(w) + p(delta) + h-_mu and b- = f(w) - p(delta) + h+_mu on
/// the mesh vertices of B(O, sqrt(delta) delta_star) inside the barrier
/// footprint. `upper` is h+_mu and `lower` is h-_mu of the mu family;
/// `gamma_minus` is the contact angle along the SideMinus arc (by arclength).
/// When w is omitted the median anchor on the probe circle is used.
/// Throws PreconditionsUnmet (barriers do not match the family, or the contact
/// inequalities fail on the probe radius) or BarrierFootprintMiss.
SandwichReport sandwich_check(const FieldProbe& probe, const MuFamily& family, const TorusBarrier& upper,
                              const TorusBarrier& lower, const std::function<double(double)>& gamma_minus,
                              double delta, double M0, std::optional<Vec2> w = std::nullopt);

using Region = std::function<bool(Vec2)>;

/// Domain points inside the footprint of the barrier.
Region footprint_region(const WedgeDomain& domain, const TorusBarrier& barrier);

/// Largest |f(x1) - f(x2)| over pairs of mesh vertices in the region with
/// |x1 - x2| <= d. At most `max_points` vertices are kept (uniform stride), so
/// the sample set does not depend on d.
double uniform_continuity_probe(const ScalarField& field, const Region& region, double d, int max_points = 4000);

}  // namespace capwedge
