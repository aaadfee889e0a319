#pragma once

#include <functional>
#include <vector>

#include "capwedge/geometry.hpp"

namespace capwedge {

enum class BarrierSign { Plus, Minus };

/// Minor radius r0 of the comparison torus (major radius 2) whose inner
/// sheets have mean curvature bounded by M2: 1/r0 - 1/(2 - r0) = M2.
double minor_radius(double M2);

/// One graph sheet of the comparison torus, placed so that its footprint has
/// the corner O on its boundary: h_beta = h o T_beta^{-1} o R_alpha^{-1}.
struct TorusBarrier {
  static constexpr double kMajorRadius = 2.0;

  BarrierSign sign{BarrierSign::Plus};
  double alpha{0.0};
  double beta{0.0};
  double r0{1.0};
  double M2{0.0};

  /// Maps a physical point to the canonical frame of the torus.
  Vec2 to_canonical(Vec2 y) const;
  Vec2 from_canonical(Vec2 x) const;
  bool in_footprint(Vec2 y, double tol = 1e-12) const;
};

/// Throws BetaOutOfRange for beta outside [-pi/2, pi/2].
TorusBarrier make_barrier(BarrierSign sign, double alpha, double beta, double M2);

bool in_canonical_footprint(double r0, Vec2 x, double tol = 1e-12);

/// Canonical sheet +-sqrt(rho(x2)^2 - (2 - x1)^2), rho(x2) = 2 - sqrt(r0^2 - x2^2).
double canonical_height(BarrierSign sign, double r0, Vec2 x);

double barrier_height(const TorusBarrier& barrier, Vec2 y);
/// Throws SingularPoint on the zero circle or on the lines |x2| = r0, where the
/// tangent plane is vertical.
Vec2 barrier_gradient(const TorusBarrier& barrier, Vec2 y);
/// div(grad h / sqrt(1 + |grad h|^2)) from the closed-form Hessian.
double barrier_mean_curvature_operator(const TorusBarrier& barrier, Vec2 y);
/// T h . nu for a unit vector nu.
double barrier_flux(const TorusBarrier& barrier, Vec2 y, Vec2 nu);

/// Twice the torus mean curvature on the inner sheet, as a function of cos v.
double torus_curvature(double r0, double cos_v);

struct CurvatureSample {
  Vec2 x;
  double div_t;
  double h_t;
};

struct CurvatureAudit {
  double min_div{0.0};
  double max_div{0.0};
  double min_h_t{0.0};
  double max_h_t{0.0};
  std::vector<CurvatureSample> samples;
};

/// Evaluates div(T h) on an n x n grid over the footprint, skipping a band of
/// width eps around the singular set. Throws BandTooNarrow for eps < 1e-8 r0.
CurvatureAudit mean_curvature_audit(const TorusBarrier& barrier, int n, double eps);

/// beta_1 = pi/2 - tau (which = 1) or beta_2 = tau - pi/2 (which = 2).
double beta_from_tau(int which, double tau);

struct WallSegment {
  Vec2 start;
  Vec2 end;
  Vec2 normal;
};

/// The straight wall through O along theta = -alpha, of length `length`,
/// with exterior normal (-sin alpha, -cos alpha).
WallSegment minus_wall(double alpha, double length);

/// T h . nu at `samples` interior points of the wall. Throws WallNotInFootprint.
std::vector<double> wall_contact_trace(const TorusBarrier& barrier, const WallSegment& wall, int samples);

struct ContactCheck {
  bool holds{false};
  double delta1{0.0};
  double worst_lower_margin{0.0};   // min of T h^- . nu - cos gamma over accepted samples
  double worst_upper_margin{0.0};   // min of cos gamma - T h^+ . nu over accepted samples
};

/// Contact inequalities on the minus wall: T h^-_{beta1} . nu > cos gamma and
/// T h^+_{beta2} . nu < cos gamma for |x| < delta1 <= delta_probe.
/// `gamma` maps arclength along the wall to a contact angle.
ContactCheck contact_inequality_check(const TorusBarrier& lower, const TorusBarrier& upper,
                                      const WedgeDomain& domain, double gamma2,
                                      const std::function<double(double)>& gamma, Side side,
                                      double delta_probe);

struct PlusWallCheck {
  bool h_minus_ok{false};
  bool h_plus_ok{false};
  Vec2 n;  // downward normal of the vertical tangent plane of h^- at O
  Vec2 m;  // same for h^+
};

PlusWallCheck plus_wall_normals_check(double tau1, double tau2, double alpha, double lambda1, double lambda2);

struct MuFamily {
  double mu;
  double tau1;
  double tau2;
  double beta;
  double theta_mu;
  double R_mu;  // NaN until a domain and M2 are supplied
};

/// Throws Condition1Violated or MuOutOfRange.
MuFamily mu_family(double alpha, double gamma2, double mu);
MuFamily mu_family(const WedgeDomain& domain, double gamma2, double mu, double M2);

/// Largest R such that every point of the domain within R of O whose polar
/// angle does not exceed theta_mu lies in the footprint Delta_mu.
double inscribed_radius(const MuFamily& family, const WedgeDomain& domain, double r0);

/// Grid estimate of the modulus of continuity of the canonical sheet.
double modulus_of_continuity(double r0, double s, int resolution = 512);

}  // namespace capwedge
