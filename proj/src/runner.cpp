#include "capwedge/runner.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace capwedge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

class ArtifactWriter {
 public:
  ArtifactWriter(const std::string& dir, RunManifest& manifest) : dir_(dir), manifest_(manifest) {
    fs::create_directories(dir_);
  }

  std::ofstream open(const std::string& name) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigError, (dir_ / name).string() + ": cannot write");
    record(name);
    return out;
  }

  void record(const std::string& name) {
    if (std::find(manifest_.artifacts.begin(), manifest_.artifacts.end(), name) == manifest_.artifacts.end()) {
      manifest_.artifacts.push_back(name);
    }
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  fs::path dir_;
  RunManifest& manifest_;
};

json verdict_json(const Condition1& c) {
  return {{"verdict", to_string(c.verdict)},
          {"lower_margin", c.lower_margin},
          {"upper_margin", c.upper_margin},
          {"reason", c.reason}};
}

json conditions_json(const ConditionReport& r) {
  json j = {{"alpha", r.alpha},
            {"gamma2", r.gamma2},
            {"verdict", to_string(overall_verdict(r))},
            {"condition1", verdict_json(r.condition1)}};
  if (r.condition2) {
    j["condition2"] = {{"verdict", to_string(r.condition2->verdict)},
                       {"prerequisite", r.condition2->prerequisite},
                       {"lower_margin", r.condition2->lower_margin},
                       {"upper_margin", r.condition2->upper_margin},
                       {"reason", r.condition2->reason}};
  }
  if (r.concus_finn) j["concus_finn"] = {{"admissible", r.concus_finn->admissible}, {"slack", r.concus_finn->slack}};
  if (r.chosen) {
    j["comparison_angles"] = {
        {"tau1", r.chosen->tau1}, {"tau2", r.chosen->tau2}, {"beta1", r.chosen->beta1}, {"beta2", r.chosen->beta2}};
  }
  return j;
}

ConditionReport condition_report(const ProblemConfig& cfg) {
  if (!cfg.gamma2) throw Error(ErrorCode::ConfigError, "analysis.gamma2: missing");
  ConditionReport r = (cfg.lambda1 && cfg.lambda2) ? check_theorem2(cfg.alpha, *cfg.gamma2, *cfg.lambda1, *cfg.lambda2)
                                                   : check_theorem1(cfg.alpha, *cfg.gamma2);
  if (cfg.gamma1) r.concus_finn = concus_finn_admissible(cfg.alpha, *cfg.gamma1, *cfg.gamma2);
  if (overall_verdict(r) == Verdict::Holds) {
    std::optional<ContactBounds> lambdas;
    if (cfg.lambda1 && cfg.lambda2) lambdas = ContactBounds{*cfg.lambda1, *cfg.lambda2};
    try {
      r.chosen = choose_comparison_angles(cfg.alpha, *cfg.gamma2, lambdas);
    } catch (const Error&) {
      r.chosen.reset();
    }
  }
  return r;
}

json classification_json(const SolveOutcome& o) {
  json j;
  if (!o.classification) {
    j["kind"] = o.classification_error.empty() ? "None" : "NoisyProfile";
    j["detail"] = o.classification_error;
  } else {
    const Classification& c = *o.classification;
    j["kind"] = kind_name(c);
    j["tolerance"] = c.tolerance;
    j["side_mismatch"] = c.side_mismatch;
    j["total_variation"] = c.total_variation;
    if (const auto* f = std::get_if<Fan>(&c.kind)) {
      j["alpha1"] = f->alpha1;
      j["alpha2"] = f->alpha2;
      j["direction"] = f->direction == FanDirection::Increasing ? "increasing" : "decreasing";
    }
    if (const auto* u = std::get_if<Unclassified>(&c.kind)) j["detail"] = u->reason;
  }
  if (o.z2) {
    j["z2"] = o.z2->limit;
    j["z2_error"] = o.z2->error_bar;
  }
  j["outside_theorem"] = o.outside_theorem;
  return j;
}

std::string classification_comment(const json& c) {
  std::ostringstream out;
  out << "# classification";
  for (const auto& [k, v] : c.items()) {
    out << ' ' << k << '=';
    if (v.is_number()) out << format_number(v.get<double>());
    else if (v.is_string()) out << v.get<std::string>();
    else out << v.dump();
  }
  return out.str();
}

void write_solution(ArtifactWriter& w, const ScalarField& f) {
  auto out = w.open("solution.csv");
  out << "# schema=1\nx1,x2,f\n";
  const Mesh& m = *f.mesh;
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    out << format_number(m.vertices[v].x) << ',' << format_number(m.vertices[v].y) << ','
        << format_number(f.values[v]) << '\n';
  }
}

void write_diagnostics(ArtifactWriter& w, const ScalarField& f, const std::string& name) {
  auto out = w.open(name);
  const SolverDiagnostics& d = f.diagnostics;
  out << "# schema=1\n";
  out << "# residual_norm=" << format_number(d.residual_norm) << " newton_iterations=" << d.newton_iterations
      << " majorant_steps=" << d.majorant_steps << " continuation_used=" << (d.continuation_used ? 1 : 0)
      << " vertices=" << f.mesh->vertices.size() << " triangles=" << f.mesh->triangles.size() << '\n';
  out << "iteration,residual,energy,damping\n";
  for (std::size_t i = 0; i < d.residual_history.size(); ++i) {
    out << i << ',' << format_number(d.residual_history[i]) << ','
        << format_number(i < d.energy_history.size() ? d.energy_history[i] : NAN) << ','
        << format_number(i == 0 ? NAN : d.damping_history[i - 1]) << '\n';
  }
}

void write_profile(ArtifactWriter& w, const RadialProfile& p, const json& classification) {
  auto out = w.open("radial_profile.csv");
  out << "# schema=1\n" << classification_comment(classification) << '\n';
  out << "# radii=";
  for (std::size_t k = 0; k < p.radii.size(); ++k) out << (k ? ";" : "") << format_number(p.radii[k]);
  out << "\ntheta,Rf,error_bar,exponent\n";
  for (std::size_t i = 0; i < p.theta_grid.size(); ++i) {
    out << format_number(p.theta_grid[i]) << ',' << format_number(p.limits[i]) << ',' << format_number(p.errors[i])
        << ',' << (p.fit_exponents[i] ? format_number(*p.fit_exponents[i]) : "NotApplicable") << '\n';
  }
}

std::vector<double> radii_for(const ProblemConfig& cfg) {
  std::vector<double> radii;
  for (int k = 0; k < cfg.radial.levels; ++k) {
    radii.push_back(cfg.radial.r_max_fraction * cfg.delta_star * std::ldexp(1.0, -k));
  }
  return radii;
}

std::function<double(double)> minus_contact_angle(const ProblemConfig& cfg) {
  const auto* cap = std::get_if<Capillary>(&cfg.bc.side_minus);
  if (cap == nullptr) throw Error(ErrorCode::PreconditionsUnmet, "sandwich needs a capillary SideMinus arc");
  return cap->gamma;
}

void pipeline(const ProblemConfig& cfg, const RunOptions& opt, ArtifactWriter& w, RunManifest& manifest,
              SolveOutcome& o) {
  auto t0 = Clock::now();
  o.domain.emplace(build_wedge(cfg.alpha, cfg.delta_star, cfg.plus_arc, cfg.minus_arc));
  const WedgeDomain& domain = *o.domain;

  if (cfg.theorem_checks) {
    o.conditions = condition_report(cfg);
    o.outside_theorem = overall_verdict(*o.conditions) != Verdict::Holds;
    auto out = w.open("conditions.json");
    out << conditions_json(*o.conditions).dump(2) << '\n';
  }

  t0 = Clock::now();
  auto mesh = std::make_shared<const Mesh>(generate_mesh(domain, cfg.mesh.h_max, cfg.mesh.grading));
  manifest.timings["mesh"] = seconds_since(t0);
  t0 = Clock::now();
  o.field.emplace(solve(domain, mesh, cfg.H, cfg.bc, cfg.solver));
  manifest.timings["solve"] = seconds_since(t0);
  if (opt.scope == RunScope::Full) {
    write_solution(w, *o.field);
    write_diagnostics(w, *o.field, "diagnostics.csv");
  }

  const std::vector<double> radii = radii_for(cfg);
  const std::vector<double> thetas = default_theta_grid(domain, cfg.radial.rays);
  const bool want_radial = opt.scope != RunScope::SandwichOnly;
  if (want_radial) {
    const ScalarField* analysed = &*o.field;
    double tol = cfg.radial.tol.value_or(0.0);
    if (cfg.refine_for_tolerance && !cfg.radial.tol) {
      t0 = Clock::now();
      auto fine_mesh = std::make_shared<const Mesh>(generate_mesh(domain, 0.5 * cfg.mesh.h_max, cfg.mesh.grading));
      o.refined.emplace(solve(domain, fine_mesh, cfg.H, cfg.bc, cfg.solver));
      manifest.timings["solve_refined"] = seconds_since(t0);
      if (opt.scope == RunScope::Full) write_diagnostics(w, *o.refined, "diagnostics_refined.csv");
      const FieldProbe coarse_probe(domain, *o.field);
      const RadialProfile coarse = radial_profile(coarse_probe, thetas, radii);
      analysed = &*o.refined;
      const FieldProbe fine_probe(domain, *analysed);
      o.profile = radial_profile(fine_probe, thetas, radii);
      tol = default_tolerance(coarse, *o.profile);
    } else {
      const FieldProbe probe(domain, *analysed);
      o.profile = radial_profile(probe, thetas, radii);
    }
    t0 = Clock::now();
    const FieldProbe probe(domain, *analysed);
    o.z2 = side_limit(probe, Side::Minus, radii);
    try {
      o.classification = classify(*o.profile, *o.z2, tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoisyProfile) throw;
      o.classification_error = e.what();
    }
    manifest.timings["radial"] = seconds_since(t0);
    const json cj = classification_json(o);
    write_profile(w, *o.profile, cj);
    {
      auto out = w.open("classification.json");
      out << cj.dump(2) << '\n';
    }
    write_svg_plot(w.path("radial_profile.svg"), "Radial limits", "theta", "Rf(theta)",
                   {PlotSeries{"Rf", o.profile->theta_grid, o.profile->limits}});
    w.record("radial_profile.svg");
  }

  if (cfg.sandwich && opt.scope != RunScope::RadialOnly) {
    t0 = Clock::now();
    const FieldProbe probe(domain, *o.field);
    const EmpiricalBounds eb = empirical_bounds(*o.field, cfg.H);
    const MuFamily family = mu_family(domain, *cfg.gamma2, cfg.sandwich->mu, eb.M2);
    const TorusBarrier upper = make_barrier(BarrierSign::Plus, domain.alpha(), family.beta, eb.M2);
    const TorusBarrier lower = make_barrier(BarrierSign::Minus, domain.alpha(), family.beta, eb.M2);
    o.sandwich = sandwich_check(probe, family, upper, lower, minus_contact_angle(cfg), cfg.sandwich->delta,
                                graph_area(*o.field));
    manifest.timings["sandwich"] = seconds_since(t0);
    const SandwichReport& s = *o.sandwich;
    {
      auto out = w.open("sandwich.json");
      const json j = {{"valid", s.valid},
                      {"vacuous_band", s.vacuous_band},
                      {"w", {s.w.x, s.w.y}},
                      {"f_w", s.f_w},
                      {"p_delta", s.p_delta},
                      {"radius", s.radius},
                      {"M1", s.M1},
                      {"M2", eb.M2},
                      {"mu", family.mu},
                      {"beta", family.beta},
                      {"R_mu", family.R_mu},
                      {"points", s.region.size()},
                      {"min_gap_lower", s.min_gap_lower},
                      {"min_gap_upper", s.min_gap_upper}};
      out << j.dump(2) << '\n';
    }
    auto out = w.open("sandwich.csv");
    out << "# schema=1\nx1,x2,f,b_minus,b_plus\n";
    for (const auto& p : s.region) {
      out << format_number(p.x.x) << ',' << format_number(p.x.y) << ',' << format_number(p.f) << ','
          << format_number(p.lower) << ',' << format_number(p.upper) << '\n';
    }
  }
}

void finish(RunManifest& m, const std::string& directory) {
  ArtifactWriter w(directory, m);
  w.record("manifest.json");
  std::ofstream out(fs::path(directory) / "manifest.json", std::ios::binary);
  out << m.to_json().dump(2) << '\n';
}

void record_error(RunManifest& m, const std::exception& e) {
  m.status = "error";
  m.error = e.what();
  const auto* err = dynamic_cast<const Error*>(&e);
  m.exit_code = err ? exit_code_for(err->code()) : 2;
}

RunManifest new_manifest(const ProblemConfig& cfg, const std::string& directory) {
  RunManifest m;
  m.id = make_run_id(cfg.document);
  m.directory = directory;
  m.config = cfg.document;
  m.versions["capwedge"] = kVersion;
  m.versions["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION);
  m.versions["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  return m;
}

std::string cell(const json& v) {
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

json RunManifest::to_json() const {
  return {{"id", id},       {"directory", directory}, {"config", config}, {"artifacts", artifacts},
          {"versions", versions}, {"timings", timings}, {"status", status}, {"error", error},
          {"exit_code", exit_code}, {"seed", seed}};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::LineSearchStalled:
    case ErrorCode::QualityFailure:
    case ErrorCode::FitIllConditioned:
    case ErrorCode::NoisyProfile:
    case ErrorCode::SingularPoint:
      return 2;
    default:
      return 1;
  }
}

std::string make_run_id(const json& config) {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &utc);
  return std::string(stamp) + "-" + config_hash(config).substr(0, 8);
}

RunManifest run_solve(const ProblemConfig& config, const std::string& directory, const RunOptions& options,
                      SolveOutcome* outcome) {
  RunManifest m = new_manifest(config, directory);
  m.seed = options.seed;
  SolveOutcome local;
  SolveOutcome& o = outcome ? *outcome : local;
  const auto t0 = Clock::now();
  try {
    ArtifactWriter w(directory, m);
    {
      auto out = w.open("config.json");
      out << config.document.dump(2) << '\n';
    }
    pipeline(config, options, w, m, o);
  } catch (const std::exception& e) {
    record_error(m, e);
  }
  m.timings["total"] = seconds_since(t0);
  finish(m, directory);
  return m;
}

RunManifest run_sweep(const ProblemConfig& config, const std::string& directory, const RunOptions& options) {
  RunManifest m = new_manifest(config, directory);
  m.seed = options.seed;
  const auto t0 = Clock::now();
  try {
    if (config.sweep.empty()) throw Error(ErrorCode::ConfigError, "sweep: missing");
    std::vector<std::vector<std::size_t>> grid;
    for (std::size_t i = 0; i < config.sweep[0].values.size(); ++i) {
      if (config.sweep.size() == 1) {
        grid.push_back({i});
      } else {
        for (std::size_t j = 0; j < config.sweep[1].values.size(); ++j) grid.push_back({i, j});
      }
    }
    struct SubResult {
      RunManifest manifest;
      SolveOutcome outcome;
    };
    std::vector<SubResult> results(grid.size());
    std::vector<std::string> names(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (std::size_t k = next++; k < grid.size(); k = next++) {
        char name[16];
        std::snprintf(name, sizeof name, "run_%03zu", k);
        names[k] = name;
        const std::string sub_dir = (fs::path(directory) / name).string();
        try {
          json doc = config.document;
          doc.erase("sweep");
          for (std::size_t a = 0; a < grid[k].size(); ++a) {
            doc = apply_sweep_value(doc, config.sweep[a].key, config.sweep[a].values[grid[k][a]]);
          }
          const ProblemConfig sub = parse_config(doc);
          RunOptions sub_opt = options;
          sub_opt.threads = 1;
          results[k].manifest = run_solve(sub, sub_dir, sub_opt, &results[k].outcome);
        } catch (const std::exception& e) {
          results[k].manifest = new_manifest(config, sub_dir);
          record_error(results[k].manifest, e);
          finish(results[k].manifest, sub_dir);
        }
      }
    };
    const int n_threads = std::max(1, std::min<int>(options.threads, static_cast<int>(grid.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    ArtifactWriter w(directory, m);
    {
      auto out = w.open("config.json");
      out << config.document.dump(2) << '\n';
    }
    std::vector<PlotSeries> overlay;
    std::vector<double> widths;
    std::ostringstream rows;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const SubResult& r = results[k];
      for (const auto& a : r.manifest.artifacts) w.record(names[k] + "/" + a);
      std::string label;
      for (std::size_t a = 0; a < grid[k].size(); ++a) {
        const std::string v = cell(config.sweep[a].values[grid[k][a]]);
        rows << v << ',';
        label += (a ? " " : "") + config.sweep[a].key + "=" + v;
      }
      rows << names[k] << ',' << r.manifest.status << ',';
      const auto& o = r.outcome;
      std::string kind = "None";
      double a1 = NAN, a2 = NAN;
      if (o.classification) {
        kind = kind_name(*o.classification);
        if (const auto* f = std::get_if<Fan>(&o.classification->kind)) {
          a1 = f->alpha1;
          a2 = f->alpha2;
          widths.push_back(a2 - a1);
        }
      } else if (!o.classification_error.empty()) {
        kind = "NoisyProfile";
      }
      rows << kind << ',' << format_number(a1) << ',' << format_number(a2) << ',' << format_number(a2 - a1) << ','
           << format_number(o.z2 ? o.z2->limit : NAN) << ',' << r.manifest.exit_code << '\n';
      if (o.profile) overlay.push_back({label, o.profile->theta_grid, o.profile->limits});
    }
    std::string trend = "n/a";
    if (widths.size() >= 2) {
      bool nonincreasing = true, nondecreasing = true;
      for (std::size_t i = 1; i < widths.size(); ++i) {
        nonincreasing = nonincreasing && widths[i] <= widths[i - 1];
        nondecreasing = nondecreasing && widths[i] >= widths[i - 1];
      }
      trend = nonincreasing ? "nonincreasing" : nondecreasing ? "nondecreasing" : "mixed";
    }
    {
      auto out = w.open("aggregate.csv");
      out << "# schema=1\n# trend alpha2-alpha1 (sweep order): " << trend << '\n';
      for (const auto& axis : config.sweep) {
        std::string header = axis.key;
        std::replace(header.begin(), header.end(), ',', '+');
        out << header << ',';
      }
      out << "run,status,kind,alpha1,alpha2,width,z2,exit_code\n" << rows.str();
    }
    write_svg_plot(w.path("radial_overlay.svg"), "Radial limits across the sweep", "theta", "Rf(theta)", overlay);
    w.record("radial_overlay.svg");
  } catch (const std::exception& e) {
    record_error(m, e);
  }
  m.timings["total"] = seconds_since(t0);
  finish(m, directory);
  return m;
}

RunManifest run_conditions(const ProblemConfig& config, const std::string& directory) {
  RunManifest m = new_manifest(config, directory);
  try {
    ArtifactWriter w(directory, m);
    const ConditionReport r = condition_report(config);
    auto out = w.open("conditions.json");
    out << conditions_json(r).dump(2) << '\n';
    switch (overall_verdict(r)) {
      case Verdict::Holds: m.exit_code = 0; break;
      case Verdict::Fails: m.exit_code = 1; break;
      case Verdict::Indeterminate: m.exit_code = 2; break;
    }
    m.status = to_string(overall_verdict(r));
  } catch (const std::exception& e) {
    record_error(m, e);
  }
  finish(m, directory);
  return m;
}

RunManifest run_barrier_audit(const ProblemConfig& config, const std::string& directory) {
  RunManifest m = new_manifest(config, directory);
  const auto t0 = Clock::now();
  try {
    if (!config.barrier) throw Error(ErrorCode::ConfigError, "barrier: missing");
    const BarrierConfig& bc = *config.barrier;
    ArtifactWriter w(directory, m);
    const TorusBarrier b = make_barrier(bc.sign, bc.alpha, bc.beta, bc.M2);
    const CurvatureAudit audit = mean_curvature_audit(b, bc.grid, bc.band);
    const bool plus = bc.sign == BarrierSign::Plus;
    const bool ok = plus ? audit.min_div >= bc.M2 - 1e-6 : audit.max_div <= -bc.M2 + 1e-6;
    json j = {{"sign", plus ? "plus" : "minus"},
              {"alpha", bc.alpha},
              {"beta", bc.beta},
              {"M2", bc.M2},
              {"r0", b.r0},
              {"min_div", audit.min_div},
              {"max_div", audit.max_div},
              {"min_h_t", audit.min_h_t},
              {"max_h_t", audit.max_h_t},
              {"samples", audit.samples.size()},
              {"bound_holds", ok}};
    {
      auto out = w.open("barrier_samples.csv");
      out << "# schema=1\nx1,x2,div_t,h_t\n";
      for (const auto& s : audit.samples) {
        out << format_number(s.x.x) << ',' << format_number(s.x.y) << ',' << format_number(s.div_t) << ','
            << format_number(s.h_t) << '\n';
      }
    }
    try {
      const WallSegment wall = minus_wall(bc.alpha, 0.9 * (TorusBarrier::kMajorRadius - b.r0));
      const std::vector<double> trace = wall_contact_trace(b, wall, 200);
      auto out = w.open("contact_trace.csv");
      out << "# schema=1\nsample,T_nu\n";
      for (std::size_t i = 0; i < trace.size(); ++i) out << i << ',' << format_number(trace[i]) << '\n';
      j["contact_trace"] = "contact_trace.csv";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::WallNotInFootprint) throw;
      j["contact_trace"] = e.what();
    }
    auto out = w.open("barrier_audit.json");
    out << j.dump(2) << '\n';
    m.exit_code = ok ? 0 : 1;
    m.status = ok ? "ok" : "bound_violated";
  } catch (const std::exception& e) {
    record_error(m, e);
  }
  m.timings["total"] = seconds_since(t0);
  finish(m, directory);
  return m;
}

void write_svg_plot(const std::string& path, const std::string& title, const std::string& xlabel,
                    const std::string& ylabel, const std::vector<PlotSeries>& series) {
  constexpr double kW = 640, kH = 420, kL = 70, kR = 20, kT = 40, kB = 50;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!(xmin < xmax)) xmin -= 0.5, xmax += 0.5;
  if (!(ymin < ymax)) ymin -= 0.5, ymax += 0.5;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto X = [&](double x) { return kL + (x - xmin) / (xmax - xmin) * (kW - kL - kR); };
  auto Y = [&](double y) { return kH - kB - (y - ymin) / (ymax - ymin) * (kH - kT - kB); };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, path + ": cannot write");
  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n";
  std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", kL, kH - kB,
                kW - kR, kH - kB);
  out << buf;
  std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", kL, kT, kL,
                kH - kB);
  out << buf;
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 4, yv = ymin + (ymax - ymin) * t / 4;
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" font-size=\"11\">%.3g</text>\n",
                  X(xv), kH - kB + 16, xv);
    out << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\" font-size=\"11\">%.3g</text>\n",
                  kL - 6, Y(yv) + 4, yv);
    out << buf;
  }
  out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << kH / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << kH / 2 << ")\">" << ylabel << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % (sizeof kColors / sizeof *kColors)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[k].x.size(); ++i) {
      if (!std::isfinite(series[k].x[i]) || !std::isfinite(series[k].y[i])) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(series[k].x[i]), Y(series[k].y[i]));
      out << buf;
    }
    out << "\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"11\" fill=\"%s\">", kL + 10,
                  kT + 14.0 * (k + 1), color);
    out << buf << series[k].name << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace capwedge
