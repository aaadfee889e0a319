#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "capwedge/geometry.hpp"
#include "capwedge/mesh.hpp"
#include "capwedge/pmc_solver.hpp"

namespace capwedge {

/// Point evaluation of a P1 field with the local mesh size at the hit.
class FieldProbe {
 public:
  FieldProbe(const WedgeDomain& domain, const ScalarField& field);

  const WedgeDomain& domain() const { return *domain_; }
  const ScalarField& field() const { return *field_; }

  /// Interpolated value; nullopt when p misses the mesh.
  std::optional<double> value(Vec2 p) const;
  /// Diameter of the triangle containing p; nullopt when p misses the mesh.
  std::optional<double> local_size(Vec2 p) const;

 private:
  const WedgeDomain* domain_;
  const ScalarField* field_;
  PointLocator locator_;
  double snap_tol_;
};

/// r_k = (delta_star / 4) 2^-k, k = 0..6.
std::vector<double> default_radii(const WedgeDomain& domain);
/// n angles at the cell midpoints of a uniform split of (-alpha, alpha).
std::vector<double> default_theta_grid(const WedgeDomain& domain, int n = 24);

/// Values of f at (r cos theta, r sin theta). Radii must be strictly
/// decreasing and at least three local mesh sizes. Throws RayOutsideDomain or
/// BelowResolution.
std::vector<double> sample_ray(const FieldProbe& probe, double theta, const std::vector<double>& radii);

struct LimitFit {
  double limit{0.0};
  double error_bar{0.0};
  /// Decay rate p of f(r) ~ L + c r^p; empty when the samples are constant.
  std::optional<double> exponent;
  double coefficient{0.0};
};

/// Least-squares fit of L + c r^p with p in [0.1, 3].
/// error_bar = max(max fit residual, |last sample - L| / 2).
/// Throws FitIllConditioned for fewer than 4 samples or radii not spanning a
/// factor of 2.
LimitFit estimate_limit(const std::vector<double>& values, const std::vector<double>& radii);

/// Limit of f along the SideMinus arc toward O. Throws PreconditionsUnmet for
/// the SidePlus arc.
LimitFit side_limit(const FieldProbe& probe, Side side, const std::vector<double>& radii);

struct RadialProfile {
  std::vector<double> theta_grid;
  std::vector<double> limits;
  std::vector<double> errors;
  std::vector<std::optional<double>> fit_exponents;
  std::vector<double> radii;
  /// samples[i][k] = f at radii[k] on ray theta_grid[i].
  std::vector<std::vector<double>> samples;
};

RadialProfile radial_profile(const FieldProbe& probe, const std::vector<double>& thetas,
                             const std::vector<double>& radii);

enum class FanDirection { Increasing, Decreasing };

struct ConstantAll {};
struct Fan {
  double alpha1;
  double alpha2;
  FanDirection direction;
};
struct Unclassified {
  std::string reason;
};

struct Classification {
  std::variant<ConstantAll, Fan, Unclassified> kind;
  double tolerance{0.0};
  /// |Rf(-alpha+) - z2|.
  double side_mismatch{0.0};
  double total_variation{0.0};
};

std::string kind_name(const Classification& c);

/// Sorts the profile into a constant profile or a fan:
/// plateaus are the longest end segments whose spread stays within tol, the
/// segment between them must not draw down by more than tol/2 against its
/// trend, and the profile must change by more than tol/2 end to end. The first ray must agree with
/// z2 within tol. Throws NoisyProfile when more than 10% of error bars exceed
/// tol/4.
Classification classify(const RadialProfile& profile, const LimitFit& z2, double tol);

/// 10 x the largest change of the innermost ring samples between two
/// resolutions of the same problem.
double default_tolerance(const RadialProfile& coarse, const RadialProfile& fine);

}  // namespace capwedge
