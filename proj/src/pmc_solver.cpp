#include "capwedge/pmc_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/SparseCholesky>

namespace capwedge {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Two-point Gauss rule on [0, 1].
constexpr double kGaussA = 0.21132486540518713;
constexpr double kGaussB = 0.78867513459481287;

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

double MeanCurvatureSpec::value(Vec2 x, double t) const {
  return std::visit(overloaded{[](const Constant& c) { return c.H; },
                               [&](const SpatialField& s) { return s.H(x); },
                               [&](const Linear& l) { return l.kappa * t + l.H0; }},
                    variant);
}

double MeanCurvatureSpec::dvalue_dt(Vec2, double) const {
  if (const auto* l = std::get_if<Linear>(&variant)) return l->kappa;
  return 0.0;
}

double MeanCurvatureSpec::primitive(Vec2 x, double t) const {
  return std::visit(overloaded{[&](const Constant& c) { return 2.0 * c.H * t; },
                               [&](const SpatialField& s) { return 2.0 * s.H(x) * t; },
                               [&](const Linear& l) { return l.kappa * t * t + 2.0 * l.H0 * t; }},
                    variant);
}

bool MeanCurvatureSpec::strictly_increasing() const {
  const auto* l = std::get_if<Linear>(&variant);
  return l != nullptr && l->kappa > 0.0;
}

MeanCurvatureSpec MeanCurvatureSpec::linear(double kappa, double H0) {
  if (!(kappa >= 0.0)) throw Error(ErrorCode::IllPosed, "linear mean curvature needs kappa >= 0");
  return {Linear{kappa, H0}};
}

const BoundaryCondition& BoundarySpec::at(BoundaryTag tag) const {
  switch (tag) {
    case BoundaryTag::SidePlus: return side_plus;
    case BoundaryTag::SideMinus: return side_minus;
    case BoundaryTag::OuterArc: return outer_arc;
  }
  return outer_arc;
}

BoundaryCondition& BoundarySpec::at(BoundaryTag tag) {
  return const_cast<BoundaryCondition&>(static_cast<const BoundarySpec&>(*this).at(tag));
}

bool BoundarySpec::any_dirichlet() const {
  return std::holds_alternative<Dirichlet>(side_plus) || std::holds_alternative<Dirichlet>(side_minus) ||
         std::holds_alternative<Dirichlet>(outer_arc);
}

double ScalarField::sup_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

PmcProblem::PmcProblem(const WedgeDomain& domain, std::shared_ptr<const Mesh> mesh, MeanCurvatureSpec H,
                       BoundarySpec bc)
    : domain_(&domain), mesh_(std::move(mesh)), H_(std::move(H)), bc_(std::move(bc)) {
  if (!bc_.any_dirichlet() && !H_.strictly_increasing()) {
    throw Error(ErrorCode::IllPosed, "needs a Dirichlet piece or a strictly increasing H(x, t)");
  }
  const Mesh& m = *mesh_;
  const std::size_t nv = m.vertices.size();
  grads_.resize(m.triangles.size());
  areas_.resize(m.triangles.size());
  lumped_.assign(nv, 0.0);
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    const Vec2 a = m.vertices[tri[0]];
    const Vec2 b = m.vertices[tri[1]];
    const Vec2 c = m.vertices[tri[2]];
    const double det = cross(b - a, c - a);
    areas_[t] = 0.5 * det;
    // grad of the barycentric coordinate opposite each edge.
    grads_[t][0] = Vec2{b.y - c.y, c.x - b.x} / det;
    grads_[t][1] = Vec2{c.y - a.y, a.x - c.x} / det;
    grads_[t][2] = Vec2{a.y - b.y, b.x - a.x} / det;
    for (int k = 0; k < 3; ++k) lumped_[tri[k]] += areas_[t] / 3.0;
  }

  is_dirichlet_.assign(nv, false);
  dirichlet_value_.assign(nv, 0.0);
  for (const auto& e : m.boundary) {
    const BoundaryCondition& cond = bc_.at(e.tag);
    if (const auto* d = std::get_if<Dirichlet>(&cond)) {
      for (int v : {e.v0, e.v1}) {
        is_dirichlet_[v] = true;
        dirichlet_value_[v] = d->phi(m.vertices[v]);
      }
    }
  }
  for (const auto& e : m.boundary) {
    const BoundaryCondition& cond = bc_.at(e.tag);
    if (const auto* c = std::get_if<Capillary>(&cond)) {
      CapEdge ce;
      ce.v0 = e.v0;
      ce.v1 = e.v1;
      ce.s0 = boundary_arclength(e.tag, m.vertices[e.v0]);
      ce.s1 = boundary_arclength(e.tag, m.vertices[e.v1]);
      ce.length = norm(m.vertices[e.v1] - m.vertices[e.v0]);
      ce.gamma = &c->gamma;
      for (double s : {ce.s0, ce.s1}) {
        const double g = c->gamma(s);
        if (!(g >= 0.0 && g <= kPi)) {
          std::ostringstream msg;
          msg << "contact angle " << g << " outside [0, pi] on " << to_string(e.tag);
          throw Error(ErrorCode::IllPosed, msg.str());
        }
      }
      cap_edges_.push_back(ce);
    }
  }
  free_index_.assign(nv, -1);
  for (std::size_t v = 0; v < nv; ++v) {
    if (!is_dirichlet_[v]) free_index_[v] = free_count_++;
  }
}

double PmcProblem::boundary_arclength(BoundaryTag tag, Vec2 p) const {
  switch (tag) {
    case BoundaryTag::SidePlus: return domain_->arclength_at(Side::Plus, std::min(norm(p), domain_->delta_star()));
    case BoundaryTag::SideMinus: return domain_->arclength_at(Side::Minus, std::min(norm(p), domain_->delta_star()));
    case BoundaryTag::OuterArc: {
      const double ds = domain_->delta_star();
      const double lo = domain_->wall_angle(Side::Minus, ds);
      const double th = lo + std::remainder(std::atan2(p.y, p.x) - lo - kPi, 2.0 * kPi) + kPi;
      return ds * (th - lo);
    }
  }
  return 0.0;
}

double PmcProblem::cos_gamma(const CapEdge& e, double s) const {
  const double g = (*e.gamma)(s);
  return std::cos(kPi / 2 + lambda_ * (g - kPi / 2));
}

double PmcProblem::energy(const std::vector<double>& f) const {
  const Mesh& m = *mesh_;
  double J = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    Vec2 p{};
    for (int k = 0; k < 3; ++k) p = p + grads_[t][k] * f[tri[k]];
    J += areas_[t] * std::sqrt(1.0 + dot(p, p));
  }
  for (std::size_t v = 0; v < m.vertices.size(); ++v) J += lumped_[v] * H_.primitive(m.vertices[v], f[v]);
  for (const auto& e : cap_edges_) {
    for (double xi : {kGaussA, kGaussB}) {
      const double s = e.s0 + xi * (e.s1 - e.s0);
      const double fv = (1.0 - xi) * f[e.v0] + xi * f[e.v1];
      J -= 0.5 * e.length * cos_gamma(e, s) * fv;
    }
  }
  return J;
}

std::vector<double> PmcProblem::residual(const std::vector<double>& f) const {
  const Mesh& m = *mesh_;
  std::vector<double> R(m.vertices.size(), 0.0);
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    Vec2 p{};
    for (int k = 0; k < 3; ++k) p = p + grads_[t][k] * f[tri[k]];
    const Vec2 flux = p / std::sqrt(1.0 + dot(p, p));
    for (int k = 0; k < 3; ++k) R[tri[k]] += areas_[t] * dot(flux, grads_[t][k]);
  }
  for (std::size_t v = 0; v < m.vertices.size(); ++v) R[v] += lumped_[v] * 2.0 * H_.value(m.vertices[v], f[v]);
  for (const auto& e : cap_edges_) {
    for (double xi : {kGaussA, kGaussB}) {
      const double s = e.s0 + xi * (e.s1 - e.s0);
      const double c = 0.5 * e.length * cos_gamma(e, s);
      R[e.v0] -= c * (1.0 - xi);
      R[e.v1] -= c * xi;
    }
  }
  for (std::size_t v = 0; v < R.size(); ++v) {
    if (is_dirichlet_[v]) R[v] = 0.0;
  }
  return R;
}

Eigen::SparseMatrix<double> PmcProblem::jacobian_free(const std::vector<double>& f) const {
  const Mesh& m = *mesh_;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(m.triangles.size() * 9 + m.vertices.size());
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    Vec2 p{};
    for (int k = 0; k < 3; ++k) p = p + grads_[t][k] * f[tri[k]];
    const double w = std::sqrt(1.0 + dot(p, p));
    const Vec2 q = p / w;
    // d(T)/d(grad f) = (I - q q^T) / w
    const double a11 = (1.0 - q.x * q.x) / w;
    const double a12 = -q.x * q.y / w;
    const double a22 = (1.0 - q.y * q.y) / w;
    for (int i = 0; i < 3; ++i) {
      const int fi = free_index_[tri[i]];
      if (fi < 0) continue;
      const Vec2 gi = grads_[t][i];
      for (int j = 0; j < 3; ++j) {
        const int fj = free_index_[tri[j]];
        if (fj < 0) continue;
        const Vec2 gj = grads_[t][j];
        const double v = gi.x * (a11 * gj.x + a12 * gj.y) + gi.y * (a12 * gj.x + a22 * gj.y);
        trips.emplace_back(fi, fj, areas_[t] * v);
      }
    }
  }
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    const int fv = free_index_[v];
    if (fv < 0) continue;
    const double d = lumped_[v] * 2.0 * H_.dvalue_dt(m.vertices[v], f[v]);
    if (d != 0.0) trips.emplace_back(fv, fv, d);
  }
  Eigen::SparseMatrix<double> K(free_count_, free_count_);
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

Eigen::SparseMatrix<double> PmcProblem::majorant_free(const std::vector<double>& f) const {
  const Mesh& m = *mesh_;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(m.triangles.size() * 9 + m.vertices.size());
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    Vec2 p{};
    for (int k = 0; k < 3; ++k) p = p + grads_[t][k] * f[tri[k]];
    const double inv_w = 1.0 / std::sqrt(1.0 + dot(p, p));
    for (int i = 0; i < 3; ++i) {
      const int fi = free_index_[tri[i]];
      if (fi < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int fj = free_index_[tri[j]];
        if (fj < 0) continue;
        trips.emplace_back(fi, fj, areas_[t] * inv_w * dot(grads_[t][i], grads_[t][j]));
      }
    }
  }
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    const int fv = free_index_[v];
    if (fv < 0) continue;
    const double d = lumped_[v] * 2.0 * H_.dvalue_dt(m.vertices[v], f[v]);
    if (d != 0.0) trips.emplace_back(fv, fv, d);
  }
  Eigen::SparseMatrix<double> K(free_count_, free_count_);
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

double PmcProblem::residual_norm(const std::vector<double>& f) const { return norm2(residual(f)); }

namespace {

struct NewtonOutcome {
  bool converged{false};
  ErrorCode failure{ErrorCode::NoConvergence};
  std::string message;
};

struct Trial {
  bool accepted{false};
  double t{0.0};
  double energy{0.0};
  std::vector<double> f;
  std::vector<double> R;
};

Eigen::VectorXd solve_free(Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>& ldlt, bool& analyzed,
                           const Eigen::SparseMatrix<double>& K, const PmcProblem& problem,
                           const std::vector<double>& R, bool& ok) {
  if (!analyzed) {
    ldlt.analyzePattern(K);
    analyzed = true;
  }
  ldlt.factorize(K);
  ok = ldlt.info() == Eigen::Success;
  Eigen::VectorXd rhs(problem.free_count());
  for (std::size_t v = 0; v < R.size(); ++v) {
    const int fi = problem.free_index()[v];
    if (fi >= 0) rhs[fi] = -R[v];
  }
  if (!ok) return rhs;
  Eigen::VectorXd d = ldlt.solve(rhs);
  ok = d.allFinite();
  return d;
}

// Backtracking with an Armijo test on the energy. Close to the solution the
// energy change falls below round-off, so a step is then accepted when it
// lowers the residual norm instead.
Trial line_search(const PmcProblem& problem, const std::vector<double>& f, const Eigen::VectorXd& d, double J,
                  const std::vector<double>& R, double rnorm, double t0) {
  const std::size_t nv = f.size();
  double slope = 0.0;
  for (std::size_t v = 0; v < nv; ++v) {
    const int fi = problem.free_index()[v];
    if (fi >= 0) slope += R[v] * d[fi];
  }
  Trial trial;
  trial.f.resize(nv);
  for (double t = t0; t >= std::ldexp(1.0, -20); t *= 0.5) {
    for (std::size_t v = 0; v < nv; ++v) {
      const int fi = problem.free_index()[v];
      trial.f[v] = fi >= 0 ? f[v] + t * d[fi] : f[v];
    }
    const double Jt = problem.energy(trial.f);
    if (!std::isfinite(Jt)) continue;
    bool ok = slope < 0.0 && Jt <= J + 1e-4 * t * slope;
    if (!ok && std::abs(Jt - J) <= 1e-13 * std::max(1.0, std::abs(J))) {
      trial.R = problem.residual(trial.f);
      ok = norm2(trial.R) < rnorm;
    } else if (ok) {
      trial.R = problem.residual(trial.f);
    }
    if (ok) {
      trial.accepted = true;
      trial.t = t;
      trial.energy = Jt;
      return trial;
    }
  }
  return trial;
}

NewtonOutcome run_newton(const PmcProblem& problem, std::vector<double>& f, const SolverOptions& opt,
                         SolverDiagnostics& diag) {
  NewtonOutcome out;
  std::vector<double> R = problem.residual(f);
  double rnorm = norm2(R);
  double J = problem.energy(f);
  diag.residual_history.push_back(rnorm);
  diag.energy_history.push_back(J);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> newton_ldlt;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> majorant_ldlt;
  bool newton_analyzed = false;
  bool majorant_analyzed = false;
  for (int it = 0; it < opt.max_iter; ++it) {
    if (rnorm <= opt.tol_newton) break;
    bool ok = false;
    const Eigen::VectorXd dn = solve_free(newton_ldlt, newton_analyzed, problem.jacobian_free(f), problem, R, ok);
    Trial best;
    if (ok) best = line_search(problem, f, dn, J, R, rnorm, opt.damping);
    // Steep regions make the Newton model nearly flat along the gradient;
    // fall back to the majorant step when Newton is heavily damped.
    if (!best.accepted || best.t < 0.25 * opt.damping) {
      bool mok = false;
      const Eigen::VectorXd dm =
          solve_free(majorant_ldlt, majorant_analyzed, problem.majorant_free(f), problem, R, mok);
      if (mok) {
        Trial m = line_search(problem, f, dm, J, R, rnorm, 1.0);
        if (m.accepted && (!best.accepted || m.energy < best.energy)) {
          best = std::move(m);
          diag.majorant_steps += 1;
        }
      }
    }
    if (!best.accepted) {
      out.failure = ErrorCode::LineSearchStalled;
      out.message = ok ? "no acceptable step above 2^-20" : "Jacobian factorization failed";
      diag.residual_norm = rnorm;
      return out;
    }
    f.swap(best.f);
    R.swap(best.R);
    rnorm = norm2(R);
    J = best.energy;
    diag.newton_iterations += 1;
    diag.damping_history.push_back(best.t);
    diag.residual_history.push_back(rnorm);
    diag.energy_history.push_back(J);
  }
  diag.residual_norm = rnorm;
  if (rnorm <= opt.tol_newton) {
    out.converged = true;
    return out;
  }
  std::ostringstream msg;
  msg << "residual " << rnorm << " after " << opt.max_iter << " iterations";
  out.message = msg.str();
  return out;
}

std::vector<double> start_vector(const PmcProblem& problem, const SolverOptions& opt) {
  const std::size_t nv = problem.mesh().vertices.size();
  std::vector<double> f(nv, 0.0);
  if (opt.initial_guess && opt.initial_guess->size() == nv) {
    f = *opt.initial_guess;
  } else {
    double sum = 0.0;
    int count = 0;
    for (std::size_t v = 0; v < nv; ++v) {
      if (problem.dirichlet_mask()[v]) {
        sum += problem.dirichlet_values()[v];
        ++count;
      }
    }
    std::fill(f.begin(), f.end(), count > 0 ? sum / count : 0.0);
  }
  for (std::size_t v = 0; v < nv; ++v) {
    if (problem.dirichlet_mask()[v]) f[v] = problem.dirichlet_values()[v];
  }
  return f;
}

}  // namespace

ScalarField solve(const WedgeDomain& domain, std::shared_ptr<const Mesh> mesh, const MeanCurvatureSpec& H,
                  const BoundarySpec& bc, const SolverOptions& options) {
  if (!(options.damping > 0.0 && options.damping <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "damping must lie in (0, 1]");
  }
  PmcProblem problem(domain, mesh, H, bc);
  SolverDiagnostics diag;
  std::vector<double> f = start_vector(problem, options);
  const std::vector<double> f0 = f;
  NewtonOutcome outcome = run_newton(problem, f, options, diag);

  if (!outcome.converged && options.continuation) {
    diag.continuation_used = true;
    f = f0;
    bool ok = true;
    for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      problem.set_continuation(lambda);
      outcome = run_newton(problem, f, options, diag);
      if (!outcome.converged) {
        ok = false;
        break;
      }
    }
    problem.set_continuation(1.0);
    if (ok) outcome.converged = true;
  }
  if (!outcome.converged) {
    throw NoConvergenceError(outcome.failure, outcome.message, std::move(f), std::move(diag));
  }
  ScalarField field;
  field.mesh = std::move(mesh);
  field.values = std::move(f);
  field.diagnostics = std::move(diag);
  return field;
}

double graph_area(const ScalarField& field) {
  const Mesh& m = *field.mesh;
  double total = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    const Vec2 a = m.vertices[tri[0]];
    const Vec2 b = m.vertices[tri[1]];
    const Vec2 c = m.vertices[tri[2]];
    const double det = cross(b - a, c - a);
    const double fa = field.values[tri[0]];
    const double fb = field.values[tri[1]];
    const double fc = field.values[tri[2]];
    // Gradient of the linear interpolant.
    const double gx = ((fb - fa) * (c.y - a.y) - (fc - fa) * (b.y - a.y)) / det;
    const double gy = ((fc - fa) * (b.x - a.x) - (fb - fa) * (c.x - a.x)) / det;
    total += 0.5 * det * std::sqrt(1.0 + gx * gx + gy * gy);
  }
  return total;
}

EmpiricalBounds empirical_bounds(const ScalarField& field, const MeanCurvatureSpec& H) {
  const Mesh& m = *field.mesh;
  EmpiricalBounds b{0.0, 0.0};
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    b.M1 = std::max(b.M1, std::abs(field.values[v]));
    b.M2 = std::max(b.M2, std::abs(H.value(m.vertices[v], field.values[v])));
  }
  if (std::holds_alternative<MeanCurvatureSpec::SpatialField>(H.variant)) {
    for (const auto& tri : m.triangles) {
      const Vec2 c = (m.vertices[tri[0]] + m.vertices[tri[1]] + m.vertices[tri[2]]) / 3.0;
      const double fc = (field.values[tri[0]] + field.values[tri[1]] + field.values[tri[2]]) / 3.0;
      b.M2 = std::max(b.M2, std::abs(H.value(c, fc)));
    }
  }
  return b;
}

CornerProbe corner_blowup_probe(const WedgeDomain& domain, double h_max, double grading, const MeanCurvatureSpec& H,
                                const BoundarySpec& bc, const SolverOptions& options) {
  CornerProbe probe{0.0, 0.0, false, false, false};
  bool diverged = false;
  auto attempt = [&](double h, double& sup, bool& converged) {
    auto mesh = std::make_shared<const Mesh>(generate_mesh(domain, h, grading));
    try {
      sup = solve(domain, mesh, H, bc, options).sup_abs();
      converged = true;
    } catch (const NoConvergenceError& e) {
      double m = 0.0;
      for (double v : e.best_iterate()) m = std::max(m, std::abs(v));
      sup = m;
      converged = false;
      // Discrete energy unbounded below: the iterates run off to infinity.
      const auto& energy = e.diagnostics().energy_history;
      if (energy.size() >= 2 && energy.back() < -1e6 * (1.0 + std::abs(energy.front()))) diverged = true;
    }
  };
  attempt(h_max, probe.sup_coarse, probe.coarse_converged);
  attempt(0.5 * h_max, probe.sup_fine, probe.fine_converged);
  probe.unbounded_corner_suspected = diverged || (probe.fine_converged && probe.sup_fine >= 2.0 * probe.sup_coarse) ||
                                     (probe.coarse_converged && !probe.fine_converged);
  return probe;
}

}  // namespace capwedge
