#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "capwedge/runner.hpp"

using namespace capwedge;

namespace {

struct Globals {
  std::string config;
  std::string out;
  int threads{1};
  std::uint64_t seed{0};
};

std::string out_dir(const Globals& g, const nlohmann::json& doc) {
  return g.out.empty() ? "runs/" + make_run_id(doc) : g.out;
}

int report(const RunManifest& m) {
  std::cout << "run " << m.id << " -> " << m.directory << '\n';
  std::cout << "status " << m.status << '\n';
  if (!m.error.empty()) std::cerr << "error: " << m.error << '\n';
  return m.exit_code;
}

ProblemConfig require_config(const Globals& g) {
  if (g.config.empty()) throw Error(ErrorCode::ConfigError, "--config: missing");
  return load_config(g.config);
}

void print_conditions(const std::string& dir) {
  std::ifstream in(dir + "/conditions.json");
  if (in) std::cout << in.rdbuf();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capillary wedge laboratory"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "problem file (JSON)");
  app.add_option("--out", g.out, "run directory");
  app.add_option("--threads", g.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "recorded in the manifest");

  auto* solve = app.add_subcommand("solve", "solve, classify radial limits, optional sandwich");
  auto* sweep = app.add_subcommand("sweep", "grid of solves over one or two config keys");
  auto* radial = app.add_subcommand("radial", "solve and classify radial limits only");
  auto* sandwich = app.add_subcommand("sandwich", "solve and check the barrier sandwich only");

  auto* conditions = app.add_subcommand("conditions", "check wedge conditions; exit 0 holds, 1 fails, 2 indeterminate");
  std::string c_alpha, c_gamma2, c_gamma1, c_lambda1, c_lambda2;
  conditions->add_option("--alpha", c_alpha);
  conditions->add_option("--gamma2", c_gamma2);
  conditions->add_option("--gamma1", c_gamma1);
  auto* l1 = conditions->add_option("--lambda1", c_lambda1);
  auto* l2 = conditions->add_option("--lambda2", c_lambda2);
  l1->needs(l2);
  l2->needs(l1);

  auto* barriers = app.add_subcommand("barriers", "torus barrier tools");
  barriers->require_subcommand(1);
  auto* audit = barriers->add_subcommand("audit", "sample div(Th) and the wall contact trace");
  std::string b_sign, b_alpha, b_beta;
  double b_M2 = -1;
  audit->add_option("--sign", b_sign)->check(CLI::IsMember({"plus", "minus"}));
  audit->add_option("--alpha", b_alpha);
  audit->add_option("--beta", b_beta);
  audit->add_option("--M2", b_M2);

  CLI11_PARSE(app, argc, argv);

  try {
    RunOptions opt;
    opt.seed = g.seed;
    opt.threads = g.threads;
    if (solve->parsed() || radial->parsed() || sandwich->parsed()) {
      const ProblemConfig cfg = require_config(g);
      if (radial->parsed()) opt.scope = RunScope::RadialOnly;
      if (sandwich->parsed()) {
        if (!cfg.sandwich) throw Error(ErrorCode::ConfigError, "analysis.sandwich: missing");
        opt.scope = RunScope::SandwichOnly;
      }
      return report(run_solve(cfg, out_dir(g, cfg.document), opt));
    }
    if (sweep->parsed()) {
      const ProblemConfig cfg = require_config(g);
      return report(run_sweep(cfg, out_dir(g, cfg.document), opt));
    }
    if (conditions->parsed()) {
      ProblemConfig cfg;
      if (!g.config.empty()) cfg = load_config(g.config);
      nlohmann::json flags;
      if (!c_alpha.empty()) cfg.alpha = parse_angle(c_alpha), flags["alpha"] = c_alpha;
      if (!c_gamma2.empty()) cfg.gamma2 = parse_angle(c_gamma2), flags["gamma2"] = c_gamma2;
      if (!c_gamma1.empty()) cfg.gamma1 = parse_angle(c_gamma1), flags["gamma1"] = c_gamma1;
      if (!c_lambda1.empty()) {
        cfg.lambda1 = parse_angle(c_lambda1), flags["lambda1"] = c_lambda1;
        cfg.lambda2 = parse_angle(c_lambda2), flags["lambda2"] = c_lambda2;
      }
      if (g.config.empty()) {
        if (c_alpha.empty()) throw Error(ErrorCode::ConfigError, "--alpha: missing");
        cfg.document = {{"conditions", flags}};
      }
      const RunManifest m = run_conditions(cfg, out_dir(g, cfg.document));
      print_conditions(m.directory);
      if (!m.error.empty()) std::cerr << "error: " << m.error << '\n';
      return m.exit_code;
    }
    if (audit->parsed()) {
      ProblemConfig cfg;
      if (!g.config.empty()) cfg = load_config(g.config);
      if (!cfg.barrier) cfg.barrier = BarrierConfig{};
      nlohmann::json flags;
      if (!b_sign.empty()) {
        cfg.barrier->sign = b_sign == "plus" ? BarrierSign::Plus : BarrierSign::Minus;
        flags["sign"] = b_sign;
      }
      if (!b_alpha.empty()) cfg.barrier->alpha = parse_angle(b_alpha), flags["alpha"] = b_alpha;
      if (!b_beta.empty()) cfg.barrier->beta = parse_angle(b_beta), flags["beta"] = b_beta;
      if (b_M2 >= 0) cfg.barrier->M2 = b_M2, flags["M2"] = b_M2;
      if (g.config.empty()) cfg.document = {{"barrier", flags}};
      return report(run_barrier_audit(cfg, out_dir(g, cfg.document)));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
