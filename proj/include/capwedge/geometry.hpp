#pragma once

#include <string>
#include <utility>
#include <vector>

#include "capwedge/vec2.hpp"

namespace capwedge {

enum class Side { Plus, Minus };

/// Angular perturbation of a straight wall: the wall is the curve
/// theta = +-alpha + offset(r). Stored as polynomial coefficients
/// offset(r) = sum_k coeffs[k] r^k.
class ArcSpec {
 public:
  ArcSpec() = default;
  explicit ArcSpec(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

  static ArcSpec straight() { return ArcSpec{}; }

  double offset(double r) const;
  double offset_derivative(double r) const;
  bool is_straight() const;
  const std::vector<double>& coeffs() const { return coeffs_; }

 private:
  std::vector<double> coeffs_;
};

/// The corner domain: points with polar radius below delta_star whose polar
/// angle lies between the two walls.
class WedgeDomain {
 public:
  double alpha() const { return alpha_; }
  double delta_star() const { return delta_star_; }
  const ArcSpec& arc(Side side) const { return side == Side::Plus ? plus_ : minus_; }
  bool straight() const { return plus_.is_straight() && minus_.is_straight(); }

  /// Polar angle of the wall `side` at radius r.
  double wall_angle(Side side, double r) const;
  Vec2 wall_point(Side side, double r) const;
  /// Unit tangent of the wall at radius r, pointing away from the corner.
  Vec2 wall_tangent(Side side, double r) const;

  double arc_length(Side side) const { return arclength_at(side, delta_star_); }
  double arclength_at(Side side, double r) const;
  double radius_at_arclength(Side side, double s) const;

  /// Membership in the closed domain, with an absolute slack `tol`.
  bool contains(Vec2 p, double tol = 1e-12) const;
  double area() const;

 private:
  friend WedgeDomain build_wedge(double, double, ArcSpec, ArcSpec);
  WedgeDomain(double alpha, double delta_star, ArcSpec plus, ArcSpec minus)
      : alpha_(alpha), delta_star_(delta_star), plus_(std::move(plus)), minus_(std::move(minus)) {}

  double alpha_;
  double delta_star_;
  ArcSpec plus_;
  ArcSpec minus_;
};

/// Validates and builds a wedge domain. Throws InvalidAngle, InvalidArc or ArcsCross.
WedgeDomain build_wedge(double alpha, double delta_star, ArcSpec plus = {}, ArcSpec minus = {});

/// Outward unit normal to the wall `side` at arclength s from the corner.
Vec2 exterior_normal(const WedgeDomain& domain, Side side, double s);

struct Polar {
  double r;
  double theta;
};

/// Polar coordinates about the corner; theta in (-pi, pi], (0,0) maps to (0,0).
Polar polar_of(Vec2 p);

}  // namespace capwedge
