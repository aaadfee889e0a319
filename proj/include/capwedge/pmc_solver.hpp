#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/SparseCore>

#include "capwedge/error.hpp"
#include "capwedge/geometry.hpp"
#include "capwedge/mesh.hpp"

namespace capwedge {

/// Right-hand side H(x, t) of div(T f) = 2 H(x, f).
struct MeanCurvatureSpec {
  struct Constant {
    double H;
  };
  struct SpatialField {
    std::function<double(Vec2)> H;
  };
  struct Linear {
    double kappa;  // >= 0
    double H0;
  };
  std::variant<Constant, SpatialField, Linear> variant{Constant{0.0}};

  double value(Vec2 x, double t) const;
  double dvalue_dt(Vec2 x, double t) const;
  /// Integral of 2 H(x, s) ds from 0 to t.
  double primitive(Vec2 x, double t) const;
  bool strictly_increasing() const;

  static MeanCurvatureSpec constant(double H) { return {Constant{H}}; }
  static MeanCurvatureSpec field(std::function<double(Vec2)> H) { return {SpatialField{std::move(H)}}; }
  static MeanCurvatureSpec linear(double kappa, double H0);
};

/// Contact angle as a function of arclength along the tagged boundary piece.
struct Capillary {
  std::function<double(double)> gamma;
};
/// Prescribed values on the tagged boundary piece.
struct Dirichlet {
  std::function<double(Vec2)> phi;
};
using BoundaryCondition = std::variant<Capillary, Dirichlet>;

struct BoundarySpec {
  BoundaryCondition side_plus{Capillary{[](double) { return kPi / 2; }}};
  BoundaryCondition side_minus{Capillary{[](double) { return kPi / 2; }}};
  BoundaryCondition outer_arc{Dirichlet{[](Vec2) { return 0.0; }}};

  const BoundaryCondition& at(BoundaryTag tag) const;
  BoundaryCondition& at(BoundaryTag tag);
  bool any_dirichlet() const;
};

struct SolverOptions {
  double tol_newton{1e-10};
  int max_iter{50};
  double damping{1.0};
  bool continuation{true};
  std::optional<std::vector<double>> initial_guess;
};

struct SolverDiagnostics {
  double residual_norm{0.0};
  int newton_iterations{0};
  std::vector<double> damping_history;
  std::vector<double> energy_history;
  std::vector<double> residual_history;
  int majorant_steps{0};
  bool continuation_used{false};
  bool unbounded_corner_suspected{false};
};

/// Discrete solution on a mesh; immutable after the solve.
struct ScalarField {
  std::shared_ptr<const Mesh> mesh;
  std::vector<double> values;
  SolverDiagnostics diagnostics;

  double sup_abs() const;
};

/// Discrete weak form on a P1 mesh:
///   R(f)[phi] = int T f . grad phi + 2 H(x, f) phi - oint_capillary cos(gamma) phi
/// with vertex-lumped H term, and the matching energy
///   J(f) = int sqrt(1 + |grad f|^2) + int Phi(x, f) - oint cos(gamma) f.
class PmcProblem {
 public:
  PmcProblem(const WedgeDomain& domain, std::shared_ptr<const Mesh> mesh, MeanCurvatureSpec H, BoundarySpec bc);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  const std::vector<bool>& dirichlet_mask() const { return is_dirichlet_; }
  const std::vector<double>& dirichlet_values() const { return dirichlet_value_; }

  /// Contact angles on capillary edges are rescaled toward pi/2:
  /// gamma_lambda = pi/2 + lambda (gamma - pi/2).
  void set_continuation(double lambda) { lambda_ = lambda; }

  double energy(const std::vector<double>& f) const;
  /// Full-length residual; entries at Dirichlet nodes are zero.
  std::vector<double> residual(const std::vector<double>& f) const;
  Eigen::SparseMatrix<double> jacobian_free(const std::vector<double>& f) const;
  /// Lagged-diffusivity matrix: area term frozen at 1/W(f). Its quadratic
  /// model majorizes J, so the full step from it never increases the energy.
  Eigen::SparseMatrix<double> majorant_free(const std::vector<double>& f) const;

  /// Applies Dirichlet values and returns the free residual norm.
  double residual_norm(const std::vector<double>& f) const;

  const std::vector<int>& free_index() const { return free_index_; }
  int free_count() const { return free_count_; }

  /// Boundary arclength coordinate of a mesh vertex on the tagged piece.
  double boundary_arclength(BoundaryTag tag, Vec2 p) const;

 private:
  struct CapEdge {
    int v0, v1;
    double s0, s1;
    double length;
    const std::function<double(double)>* gamma;
  };
  double cos_gamma(const CapEdge& e, double s) const;

  const WedgeDomain* domain_;
  std::shared_ptr<const Mesh> mesh_;
  MeanCurvatureSpec H_;
  BoundarySpec bc_;
  std::vector<std::array<Vec2, 3>> grads_;
  std::vector<double> areas_;
  std::vector<double> lumped_;
  std::vector<CapEdge> cap_edges_;
  std::vector<bool> is_dirichlet_;
  std::vector<double> dirichlet_value_;
  std::vector<int> free_index_;
  int free_count_{0};
  double lambda_{1.0};
};

/// Newton failure carrying the best iterate.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(ErrorCode code, const std::string& what, std::vector<double> best, SolverDiagnostics diag)
      : Error(code, what), best_(std::move(best)), diag_(std::move(diag)) {}
  const std::vector<double>& best_iterate() const { return best_; }
  const SolverDiagnostics& diagnostics() const { return diag_; }

 private:
  std::vector<double> best_;
  SolverDiagnostics diag_;
};

/// Damped Newton solve. Throws IllPosed, NoConvergence (as NoConvergenceError)
/// or LineSearchStalled.
ScalarField solve(const WedgeDomain& domain, std::shared_ptr<const Mesh> mesh, const MeanCurvatureSpec& H,
                  const BoundarySpec& bc, const SolverOptions& options = {});

/// Area of the discrete graph, sum of |T| sqrt(1 + |grad f|^2).
double graph_area(const ScalarField& field);

struct EmpiricalBounds {
  double M1;
  double M2;
};

EmpiricalBounds empirical_bounds(const ScalarField& field, const MeanCurvatureSpec& H);

struct CornerProbe {
  double sup_coarse;
  double sup_fine;
  bool unbounded_corner_suspected;
  bool coarse_converged;
  bool fine_converged;
};

/// Solves at h_max and h_max/2 and flags a corner blow-up when sup|f| at
/// least doubles, when the finer discrete problem has no solution, or when the
/// discrete energy runs off to minus infinity.
CornerProbe corner_blowup_probe(const WedgeDomain& domain, double h_max, double grading,
                                const MeanCurvatureSpec& H, const BoundarySpec& bc,
                                const SolverOptions& options = {});

}  // namespace capwedge
