#include "capwedge/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>

namespace capwedge {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::ConfigError, key + ": " + what);
}

const json* find(const json& obj, const std::string& name) {
  if (!obj.is_object()) return nullptr;
  const auto it = obj.find(name);
  return it == obj.end() ? nullptr : &*it;
}

const json& require(const json& obj, const std::string& name, const std::string& path) {
  const json* v = find(obj, name);
  if (v == nullptr) fail(path.empty() ? name : path + "." + name, "missing");
  return *v;
}

std::string join(const std::string& path, const std::string& name) { return path.empty() ? name : path + "." + name; }

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) fail(key, "expected a number");
  return v.get<double>();
}

double as_angle(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_angle(v.get<std::string>());
    } catch (const Error& e) {
      fail(key, e.what());
    }
  }
  fail(key, "expected an angle (number or expression like \"pi/3\")");
}

double number_or(const json& obj, const std::string& name, const std::string& path, double fallback) {
  const json* v = find(obj, name);
  return v ? as_number(*v, join(path, name)) : fallback;
}

std::vector<double> number_list(const json& v, const std::string& key) {
  if (!v.is_array()) fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

struct Term {
  double c;
  int i;
  int j;
};

std::vector<Term> poly_terms(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) fail(key, "expected a non-empty array of [coefficient, i, j] terms");
  std::vector<Term> terms;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::string tk = key + "[" + std::to_string(k) + "]";
    const json& t = v[k];
    if (!t.is_array() || t.size() != 3 || !t[1].is_number_integer() || !t[2].is_number_integer() ||
        t[1].get<int>() < 0 || t[2].get<int>() < 0) {
      fail(tk, "expected [coefficient, i, j] with integer exponents i, j >= 0");
    }
    terms.push_back({as_number(t[0], tk), t[1].get<int>(), t[2].get<int>()});
  }
  return terms;
}

std::function<double(Vec2)> polynomial_field(std::vector<Term> terms) {
  return [terms = std::move(terms)](Vec2 p) {
    double s = 0.0;
    for (const auto& t : terms) s += t.c * std::pow(p.x, t.i) * std::pow(p.y, t.j);
    return s;
  };
}

BoundaryCondition parse_bc(const json& v, const std::string& key) {
  const std::string type = require(v, "type", key).is_string() ? v["type"].get<std::string>() : "";
  if (type == "capillary") {
    const json& g = require(v, "gamma", key);
    if (g.is_object()) {
      auto coeffs = number_list(require(g, "polynomial", join(key, "gamma")), join(key, "gamma.polynomial"));
      return Capillary{[coeffs](double s) {
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s + *it;
        return acc;
      }};
    }
    const double gamma = as_angle(g, join(key, "gamma"));
    if (!(gamma >= 0.0 && gamma <= kPi)) fail(join(key, "gamma"), "contact angle outside [0, pi]");
    return Capillary{[gamma](double) { return gamma; }};
  }
  if (type == "dirichlet") {
    const json& preset = require(v, "preset", key);
    const std::string name = preset.is_string() ? preset.get<std::string>() : "";
    if (name == "constant") {
      const double c = as_number(require(v, "value", key), join(key, "value"));
      return Dirichlet{[c](Vec2) { return c; }};
    }
    if (name == "tanh_jump") {
      const double eps = as_number(require(v, "eps", key), join(key, "eps"));
      if (!(eps > 0.0)) fail(join(key, "eps"), "jump width must be positive");
      const double a = number_or(v, "a", key, -1.0);
      const double b = number_or(v, "b", key, 1.0);
      const json* c = find(v, "center");
      const double center = c ? as_angle(*c, join(key, "center")) : 0.0;
      // Jump in the polar angle: a below center, b above.
      return Dirichlet{[=](Vec2 p) {
        const double theta = std::atan2(p.y, p.x);
        return 0.5 * (a + b) + 0.5 * (b - a) * std::tanh((theta - center) / eps);
      }};
    }
    if (name == "polynomial") return Dirichlet{polynomial_field(poly_terms(require(v, "terms", key), join(key, "terms")))};
    fail(join(key, "preset"), "expected constant, tanh_jump or polynomial");
  }
  fail(join(key, "type"), "expected capillary or dirichlet");
}

MeanCurvatureSpec parse_H(const json& v, const std::string& key) {
  const std::string type = require(v, "type", key).is_string() ? v["type"].get<std::string>() : "";
  if (type == "constant") return MeanCurvatureSpec::constant(as_number(require(v, "value", key), join(key, "value")));
  if (type == "linear") {
    const double kappa = as_number(require(v, "kappa", key), join(key, "kappa"));
    if (kappa < 0.0) fail(join(key, "kappa"), "must be >= 0");
    return MeanCurvatureSpec::linear(kappa, number_or(v, "H0", key, 0.0));
  }
  if (type == "polynomial") return MeanCurvatureSpec::field(polynomial_field(poly_terms(require(v, "terms", key), join(key, "terms"))));
  fail(join(key, "type"), "expected constant, linear or polynomial");
}

}  // namespace

double parse_angle(const std::string& text) {
  static const std::regex kNumber(R"(\s*([-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?)\s*)");
  static const std::regex kPiExpr(
      R"(\s*([-+])?\s*(([0-9]*\.?[0-9]+)\s*\*?\s*)?pi\s*(/\s*([0-9]*\.?[0-9]+))?\s*)");
  std::smatch m;
  if (std::regex_match(text, m, kNumber)) return std::stod(m[1].str());
  if (std::regex_match(text, m, kPiExpr)) {
    double v = kPi;
    if (m[3].matched) v *= std::stod(m[3].str());
    if (m[5].matched) {
      const double d = std::stod(m[5].str());
      if (d == 0.0) throw Error(ErrorCode::ConfigError, "division by zero in angle \"" + text + "\"");
      v /= d;
    }
    if (m[1].matched && m[1].str() == "-") v = -v;
    return v;
  }
  throw Error(ErrorCode::ConfigError, "cannot parse angle \"" + text + "\"");
}

ProblemConfig parse_config(const json& doc) {
  if (!doc.is_object()) fail("<root>", "expected an object");
  ProblemConfig cfg;
  cfg.document = doc;
  if (const json* n = find(doc, "name"); n && n->is_string()) cfg.name = n->get<std::string>();

  const json& domain = require(doc, "domain", "");
  cfg.alpha = as_angle(require(domain, "alpha", "domain"), "domain.alpha");
  cfg.delta_star = number_or(domain, "delta_star", "domain", 1.0);
  if (const json* o = find(domain, "plus_offset")) cfg.plus_arc = ArcSpec(number_list(*o, "domain.plus_offset"));
  if (const json* o = find(domain, "minus_offset")) cfg.minus_arc = ArcSpec(number_list(*o, "domain.minus_offset"));

  if (const json* m = find(doc, "mesh")) {
    cfg.mesh.h_max = number_or(*m, "h_max", "mesh", cfg.mesh.h_max);
    cfg.mesh.grading = number_or(*m, "grading", "mesh", cfg.mesh.grading);
    if (!(cfg.mesh.h_max > 0.0)) fail("mesh.h_max", "must be positive");
    if (cfg.mesh.grading < 0.0) fail("mesh.grading", "must be >= 0");
  }
  if (const json* h = find(doc, "mean_curvature")) cfg.H = parse_H(*h, "mean_curvature");

  if (const json* b = find(doc, "boundary")) {
    if (const json* v = find(*b, "side_plus")) cfg.bc.side_plus = parse_bc(*v, "boundary.side_plus");
    if (const json* v = find(*b, "side_minus")) cfg.bc.side_minus = parse_bc(*v, "boundary.side_minus");
    if (const json* v = find(*b, "outer_arc")) cfg.bc.outer_arc = parse_bc(*v, "boundary.outer_arc");
  }

  if (const json* s = find(doc, "solver")) {
    cfg.solver.tol_newton = number_or(*s, "tol_newton", "solver", cfg.solver.tol_newton);
    cfg.solver.damping = number_or(*s, "damping", "solver", cfg.solver.damping);
    if (const json* it = find(*s, "max_iter")) {
      if (!it->is_number_integer() || it->get<int>() < 1) fail("solver.max_iter", "expected a positive integer");
      cfg.solver.max_iter = it->get<int>();
    }
    if (const json* c = find(*s, "continuation")) {
      if (!c->is_boolean()) fail("solver.continuation", "expected true or false");
      cfg.solver.continuation = c->get<bool>();
    }
    if (!(cfg.solver.damping > 0.0 && cfg.solver.damping <= 1.0)) fail("solver.damping", "must lie in (0, 1]");
    if (!(cfg.solver.tol_newton > 0.0)) fail("solver.tol_newton", "must be positive");
  }

  if (const json* a = find(doc, "analysis")) {
    if (const json* t = find(*a, "theorem_checks")) {
      if (!t->is_boolean()) fail("analysis.theorem_checks", "expected true or false");
      cfg.theorem_checks = t->get<bool>();
    }
    if (const json* g = find(*a, "gamma2")) cfg.gamma2 = as_angle(*g, "analysis.gamma2");
    if (const json* g = find(*a, "gamma1")) cfg.gamma1 = as_angle(*g, "analysis.gamma1");
    if (const json* l = find(*a, "lambda1")) cfg.lambda1 = as_angle(*l, "analysis.lambda1");
    if (const json* l = find(*a, "lambda2")) cfg.lambda2 = as_angle(*l, "analysis.lambda2");
    if (cfg.lambda1.has_value() != cfg.lambda2.has_value()) {
      fail(cfg.lambda1 ? "analysis.lambda2" : "analysis.lambda1", "missing (lambda1 and lambda2 come together)");
    }
    if (const json* r = find(*a, "radial")) {
      if (const json* n = find(*r, "rays")) {
        if (!n->is_number_integer() || n->get<int>() < 2) fail("analysis.radial.rays", "expected an integer >= 2");
        cfg.radial.rays = n->get<int>();
      }
      if (const json* n = find(*r, "levels")) {
        if (!n->is_number_integer() || n->get<int>() < 4) fail("analysis.radial.levels", "expected an integer >= 4");
        cfg.radial.levels = n->get<int>();
      }
      cfg.radial.r_max_fraction = number_or(*r, "r_max_fraction", "analysis.radial", cfg.radial.r_max_fraction);
      if (!(cfg.radial.r_max_fraction > 0.0 && cfg.radial.r_max_fraction < 1.0)) {
        fail("analysis.radial.r_max_fraction", "must lie in (0, 1)");
      }
      if (const json* t = find(*r, "tol")) cfg.radial.tol = as_number(*t, "analysis.radial.tol");
    }
    if (const json* r = find(*a, "refine_for_tolerance")) {
      if (!r->is_boolean()) fail("analysis.refine_for_tolerance", "expected true or false");
      cfg.refine_for_tolerance = r->get<bool>();
    }
    if (const json* s = find(*a, "sandwich")) {
      SandwichConfig sw;
      sw.mu = as_angle(require(*s, "mu", "analysis.sandwich"), "analysis.sandwich.mu");
      sw.delta = number_or(*s, "delta", "analysis.sandwich", sw.delta);
      cfg.sandwich = sw;
    }
  }
  if ((cfg.theorem_checks || cfg.sandwich) && !cfg.gamma2) fail("analysis.gamma2", "missing (required by theorem checks and sandwich)");
  if (!cfg.refine_for_tolerance && !cfg.radial.tol) {
    fail("analysis.radial.tol", "missing (required when refine_for_tolerance is false)");
  }

  if (const json* b = find(doc, "barrier")) {
    BarrierConfig bc;
    const json& s = require(*b, "sign", "barrier");
    const std::string sign = s.is_string() ? s.get<std::string>() : "";
    if (sign == "plus") bc.sign = BarrierSign::Plus;
    else if (sign == "minus") bc.sign = BarrierSign::Minus;
    else fail("barrier.sign", "expected plus or minus");
    bc.alpha = as_angle(require(*b, "alpha", "barrier"), "barrier.alpha");
    bc.beta = as_angle(require(*b, "beta", "barrier"), "barrier.beta");
    bc.M2 = as_number(require(*b, "M2", "barrier"), "barrier.M2");
    if (const json* g = find(*b, "grid")) {
      if (!g->is_number_integer() || g->get<int>() < 2) fail("barrier.grid", "expected an integer >= 2");
      bc.grid = g->get<int>();
    }
    bc.band = number_or(*b, "band", "barrier", bc.band);
    cfg.barrier = bc;
  }

  if (const json* sw = find(doc, "sweep")) {
    if (!sw->is_array() || sw->empty() || sw->size() > 2) fail("sweep", "expected one or two axes");
    for (std::size_t i = 0; i < sw->size(); ++i) {
      const std::string key = "sweep[" + std::to_string(i) + "]";
      SweepAxis axis;
      const json& k = require((*sw)[i], "key", key);
      if (!k.is_string()) fail(key + ".key", "expected a dotted path");
      axis.key = k.get<std::string>();
      const json& vals = require((*sw)[i], "values", key);
      if (!vals.is_array() || vals.empty()) fail(key + ".values", "empty value list");
      axis.values.assign(vals.begin(), vals.end());
      apply_sweep_value(doc, axis.key, axis.values.front());
      cfg.sweep.push_back(std::move(axis));
    }
  }
  return cfg;
}

ProblemConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    std::ostringstream msg;
    msg << "line " << line << ": syntax error";
    throw Error(ErrorCode::ConfigError, msg.str());
  }
  return parse_config(doc);
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, path + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

json with_override(const json& document, const std::string& key, const json& value) {
  json out = document;
  json* node = &out;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty() || !node->is_object()) fail(key, "not a path into the config");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return out;
    }
    const auto it = node->find(part);
    if (it == node->end()) fail(key, "missing intermediate key \"" + part + "\"");
    node = &*it;
    start = dot + 1;
  }
}

json apply_sweep_value(const json& document, const std::string& keys, const json& value) {
  json out = document;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = keys.find(',', start);
    out = with_override(out, keys.substr(start, comma == std::string::npos ? std::string::npos : comma - start), value);
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

std::string config_hash(const json& document) {
  const std::string text = document.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace capwedge
