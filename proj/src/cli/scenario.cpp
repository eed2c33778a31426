#include "ptc/cli/scenario.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "bundled_scenarios.hpp"

namespace ptc::cli {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Itc: return "itc";
    case Variant::Ptc: return "ptc";
    case Variant::PtcPure: return "ptc_pure";
  }
  return "itc";
}

Variant variant_from_string(const std::string& s) {
  if (s == "itc") return Variant::Itc;
  if (s == "ptc") return Variant::Ptc;
  if (s == "ptc_pure") return Variant::PtcPure;
  throw DomainError("unknown variant '" + s + "' (expected itc|ptc|ptc_pure)");
}

std::string to_string(ItcKind k) {
  return k == ItcKind::PdGravity ? "pd_gravity" : "feedback_linearization";
}

namespace {

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(path.empty() ? "<root>" : path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(join(path, key), "unknown key");
  }
}

double as_double(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) throw ConfigError(path, "expected a number");
  try {
    const double v = n.as<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
    return v;
  } catch (const YAML::Exception&) {
    throw ConfigError(path, "expected a number, got '" + n.Scalar() + "'");
  }
}

double get_double(const YAML::Node& parent, const std::string& parent_path, const std::string& key,
                  std::optional<double> fallback = std::nullopt) {
  const auto n = parent[key];
  if (!n) {
    if (fallback) return *fallback;
    throw ConfigError(join(parent_path, key), "missing");
  }
  return as_double(n, join(parent_path, key));
}

std::string get_string(const YAML::Node& parent, const std::string& parent_path, const std::string& key,
                       std::optional<std::string> fallback = std::nullopt) {
  const auto n = parent[key];
  if (!n) {
    if (fallback) return *fallback;
    throw ConfigError(join(parent_path, key), "missing");
  }
  if (!n.IsScalar()) throw ConfigError(join(parent_path, key), "expected a string");
  return n.Scalar();
}

bool get_bool(const YAML::Node& parent, const std::string& parent_path, const std::string& key, bool fallback) {
  const auto n = parent[key];
  if (!n) return fallback;
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    throw ConfigError(join(parent_path, key), "expected true or false");
  }
}

std::vector<double> as_list(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence()) throw ConfigError(path, "expected a list");
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_double(n[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Vec as_vec(const YAML::Node& n, const std::string& path, int size, double scale = 1.0) {
  const auto v = as_list(n, path);
  if (static_cast<int>(v.size()) != size) throw ConfigError(path, "expected " + std::to_string(size) + " entries");
  Vec out(size);
  for (int i = 0; i < size; ++i) out(i) = v[static_cast<std::size_t>(i)] * scale;
  return out;
}

Mat as_mat(const YAML::Node& n, const std::string& path, int rows) {
  if (!n.IsSequence() || static_cast<int>(n.size()) != rows)
    throw ConfigError(path, "expected a " + std::to_string(rows) + "x" + std::to_string(rows) + " matrix");
  Mat m(rows, rows);
  for (int r = 0; r < rows; ++r) {
    const Vec row = as_vec(n[static_cast<std::size_t>(r)], path + "[" + std::to_string(r) + "]", rows);
    m.row(r) = row.transpose();
  }
  return m;
}

timewarp::MapRecord as_map_record(const YAML::Node& n, const std::string& path) {
  check_keys(n, path, {"family", "terms", "tau"});
  timewarp::MapRecord rec;
  rec.family = get_string(n, path, "family");
  rec.tau = get_double(n, path, "tau");
  const auto terms = n["terms"];
  if (!terms || !terms.IsSequence()) throw ConfigError(join(path, "terms"), "expected a list of rows");
  for (std::size_t i = 0; i < terms.size(); ++i)
    rec.terms.push_back(as_list(terms[i], join(path, "terms") + "[" + std::to_string(i) + "]"));
  try {
    (void)timewarp::from_record(rec);
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  return rec;
}

template <typename F>
auto convert(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<root>", std::string("YAML parse error: ") + e.what());
  }
  if (!root || root.IsNull()) throw ConfigError("<root>", "empty scenario document");
  check_keys(root, "", {"name", "model", "controller", "design", "initial", "sim", "disturbance", "output"});

  Scenario s;
  s.name = get_string(root, "", "name");
  if (s.name.empty()) throw ConfigError("name", "must not be empty");

  const auto model = root["model"];
  if (!model) throw ConfigError("model", "missing");
  check_keys(model, "model", {"kind", "form", "params"});
  if (get_string(model, "model", "kind", "two_link") != "two_link")
    throw ConfigError("model.kind", "only 'two_link' is supported");
  s.form = convert("model.form", [&] { return dynamics::two_link_form_from_string(get_string(model, "model", "form", "textbook")); });
  if (const auto p = model["params"]) {
    check_keys(p, "model.params", {"l1", "l2", "lc1", "lc2", "m1", "m2", "I1", "I2", "g"});
    const dynamics::TwoLinkParams d;
    s.params.l1 = get_double(p, "model.params", "l1", d.l1);
    s.params.l2 = get_double(p, "model.params", "l2", d.l2);
    s.params.lc1 = get_double(p, "model.params", "lc1", d.lc1);
    s.params.lc2 = get_double(p, "model.params", "lc2", d.lc2);
    s.params.m1 = get_double(p, "model.params", "m1", d.m1);
    s.params.m2 = get_double(p, "model.params", "m2", d.m2);
    s.params.I1 = get_double(p, "model.params", "I1", d.I1);
    s.params.I2 = get_double(p, "model.params", "I2", d.I2);
    s.params.g0 = get_double(p, "model.params", "g", d.g0);
    convert("model.params", [&] { return dynamics::two_link_model(s.params, s.form).n; });
  }
  const int n = 2;

  const auto c = root["controller"];
  if (!c) throw ConfigError("controller", "missing");
  check_keys(c, "controller", {"itc", "P", "D", "q_d", "joint_limits", "variant", "kappa", "t0", "epsilon", "sigma",
                               "switch_norm"});
  auto& cs = s.controller;
  const auto itc = get_string(c, "controller", "itc", "pd_gravity");
  if (itc == "pd_gravity") {
    cs.itc = ItcKind::PdGravity;
  } else if (itc == "feedback_linearization") {
    cs.itc = ItcKind::FeedbackLinearization;
  } else {
    throw ConfigError("controller.itc", "expected pd_gravity|feedback_linearization");
  }
  if (!c["P"]) throw ConfigError("controller.P", "missing");
  if (!c["D"]) throw ConfigError("controller.D", "missing");
  cs.P = as_mat(c["P"], "controller.P", n);
  cs.D = as_mat(c["D"], "controller.D", n);
  if (!c["q_d"]) throw ConfigError("controller.q_d", "missing");
  cs.target = as_vec(c["q_d"], "controller.q_d", n, kDegToRad);
  if (const auto jl = c["joint_limits"]) {
    if (!jl.IsSequence()) throw ConfigError("controller.joint_limits", "expected a list");
    for (std::size_t i = 0; i < jl.size(); ++i) {
      const std::string path = "controller.joint_limits[" + std::to_string(i) + "]";
      check_keys(jl[i], path, {"joint", "lower", "upper", "influence", "gain"});
      control::JointLimit l;
      const double joint = get_double(jl[i], path, "joint");
      if (joint != std::floor(joint) || joint < 1 || joint > n)
        throw ConfigError(join(path, "joint"), "expected a joint number in 1.." + std::to_string(n));
      l.joint = static_cast<int>(joint) - 1;
      l.lower = get_double(jl[i], path, "lower") * kDegToRad;
      l.upper = get_double(jl[i], path, "upper") * kDegToRad;
      l.influence = get_double(jl[i], path, "influence", 0.5) * kDegToRad;
      l.gain = get_double(jl[i], path, "gain", 1e-9);
      if (!(l.lower < l.upper)) throw ConfigError(path, "lower must be below upper");
      if (!(l.influence > 0.0)) throw ConfigError(join(path, "influence"), "must be positive");
      if (!(l.gain >= 0.0)) throw ConfigError(join(path, "gain"), "must be >= 0");
      cs.joint_limits.push_back(l);
    }
  }
  cs.variant = convert("controller.variant", [&] { return variant_from_string(get_string(c, "controller", "variant", "ptc")); });
  if (!c["kappa"]) throw ConfigError("controller.kappa", "missing");
  cs.kappa = as_map_record(c["kappa"], "controller.kappa");
  cs.t0 = get_double(c, "controller", "t0", 0.0);
  cs.epsilon = get_double(c, "controller", "epsilon", 1.0);
  cs.sigma = get_double(c, "controller", "sigma", 0.0);
  if (!(cs.epsilon > 0.0 && cs.epsilon < cs.kappa.tau))
    throw ConfigError("controller.epsilon", "must satisfy 0 < epsilon < tau");
  if (!(cs.sigma >= 0.0)) throw ConfigError("controller.sigma", "must be >= 0");
  cs.switch_norm = convert("controller.switch_norm", [&] {
    return control::switch_norm_from_string(get_string(c, "controller", "switch_norm", "error"));
  });

  if (const auto d = root["design"]) {
    check_keys(d, "design", {"candidates", "exponential_hint", "alpha", "check_horizon"});
    if (const auto cand = d["candidates"]) {
      if (!cand.IsSequence()) throw ConfigError("design.candidates", "expected a list");
      for (std::size_t i = 0; i < cand.size(); ++i)
        s.design.candidates.push_back(as_map_record(cand[i], "design.candidates[" + std::to_string(i) + "]"));
    }
    if (const auto h = d["exponential_hint"]) {
      if (h.IsScalar() && h.Scalar() == "closed_loop") {
        s.design.hint_is_closed_loop = true;
      } else if (h.IsSequence()) {
        s.design.exponential_hint = as_mat(h, "design.exponential_hint", static_cast<int>(h.size()));
      } else if (!(h.IsScalar() && (h.Scalar() == "none" || h.Scalar().empty()))) {
        throw ConfigError("design.exponential_hint", "expected 'closed_loop', 'none' or a square matrix");
      }
    }
    s.design.alpha = get_double(d, "design", "alpha", 0.45);
    if (!(s.design.alpha > 0.0 && s.design.alpha < 0.5)) throw ConfigError("design.alpha", "must lie in (0, 0.5)");
    s.design.check_horizon = get_double(d, "design", "check_horizon", 200.0);
    if (!(s.design.check_horizon > 0.0)) throw ConfigError("design.check_horizon", "must be positive");
  }

  s.q0 = Vec::Zero(n);
  s.qd0 = Vec::Zero(n);
  if (const auto ini = root["initial"]) {
    check_keys(ini, "initial", {"q", "qd"});
    if (ini["q"]) s.q0 = as_vec(ini["q"], "initial.q", n, kDegToRad);
    if (ini["qd"]) s.qd0 = as_vec(ini["qd"], "initial.qd", n, kDegToRad);
  }

  if (const auto sm = root["sim"]) {
    check_keys(sm, "sim", {"horizon", "step", "control_sampling", "max_refine", "itc_horizon"});
    s.sim.horizon = get_double(sm, "sim", "horizon", s.sim.horizon);
    s.sim.step = get_double(sm, "sim", "step", s.sim.step);
    s.sim.sampling = convert("sim.control_sampling", [&] {
      return sim::control_sampling_from_string(get_string(sm, "sim", "control_sampling", "per_stage"));
    });
    const double refine = get_double(sm, "sim", "max_refine", 0.0);
    if (refine != std::floor(refine) || refine < 0 || refine > 40)
      throw ConfigError("sim.max_refine", "expected an integer in 0..40");
    s.sim.max_refine = static_cast<int>(refine);
    s.sim.itc_horizon = get_double(sm, "sim", "itc_horizon", s.sim.itc_horizon);
  }
  if (!(s.sim.step > 0.0)) throw ConfigError("sim.step", "must be positive");
  if (!(s.sim.horizon > 0.0)) throw ConfigError("sim.horizon", "must be positive");
  if (!(s.sim.itc_horizon > 0.0)) throw ConfigError("sim.itc_horizon", "must be positive");

  if (const auto d = root["disturbance"]) {
    check_keys(d, "disturbance", {"enabled", "kind", "std", "scaling", "seed", "seeds"});
    auto& ds = s.disturbance;
    ds.enabled = get_bool(d, "disturbance", "enabled", false);
    const auto kind = get_string(d, "disturbance", "kind", "wiener");
    if (kind != "wiener") throw ConfigError("disturbance.kind", "only 'wiener' is supported");
    ds.std = get_double(d, "disturbance", "std", 0.1);
    if (!(ds.std >= 0.0)) throw ConfigError("disturbance.std", "must be >= 0");
    ds.scaling = convert("disturbance.scaling", [&] {
      return sim::wiener_scaling_from_string(get_string(d, "disturbance", "scaling", "per_sqrt_second"));
    });
    const double seed = get_double(d, "disturbance", "seed", 0.0);
    if (seed < 0 || seed != std::floor(seed) || seed > 9.007199254740992e15)
      throw ConfigError("disturbance.seed", "expected a non-negative integer");
    ds.seed = static_cast<std::uint64_t>(seed);
    const double seeds = get_double(d, "disturbance", "seeds", 1.0);
    if (seeds < 1 || seeds != std::floor(seeds) || seeds > 100000)
      throw ConfigError("disturbance.seeds", "expected an integer in 1..100000");
    ds.seeds = static_cast<int>(seeds);
  }
  s.output = get_string(root, "", "output", "out/" + s.name);
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

namespace {

// Shortest decimal that reads back to the same double.
std::string num(double v) {
  std::ostringstream o;
  for (int p = 1; p <= 17; ++p) {
    o.str("");
    o << std::setprecision(p) << v;
    if (std::stod(o.str()) == v) break;
  }
  return o.str();
}

std::string list(const Vec& v, double scale = 1.0) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v(i) * scale);
  return s + "]";
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + "]";
}

std::string matrix(const Mat& m) {
  std::string s = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) s += (r ? ", " : "") + list(Vec(m.row(r).transpose()));
  return s + "]";
}

std::string map_record(const timewarp::MapRecord& r) {
  std::string s = "{family: " + r.family + ", terms: [";
  for (std::size_t i = 0; i < r.terms.size(); ++i) s += (i ? ", " : "") + list(r.terms[i]);
  return s + "], tau: " + num(r.tau) + "}";
}

}  // namespace

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream o;
  const auto& p = s.params;
  const auto& c = s.controller;
  o << "name: " << s.name << '\n';
  o << "model:\n  kind: two_link\n  form: " << dynamics::to_string(s.form) << '\n';
  o << "  params: {l1: " << num(p.l1) << ", l2: " << num(p.l2) << ", lc1: " << num(p.lc1) << ", lc2: " << num(p.lc2)
    << ", m1: " << num(p.m1) << ", m2: " << num(p.m2) << ", I1: " << num(p.I1) << ", I2: " << num(p.I2)
    << ", g: " << num(p.g0) << "}\n";
  o << "controller:\n  itc: " << to_string(c.itc) << '\n';
  o << "  P: " << matrix(c.P) << "\n  D: " << matrix(c.D) << '\n';
  o << "  q_d: " << list(c.target, kRadToDeg) << '\n';
  if (c.joint_limits.empty()) {
    o << "  joint_limits: []\n";
  } else {
    o << "  joint_limits:\n";
    for (const auto& l : c.joint_limits)
      o << "    - {joint: " << l.joint + 1 << ", lower: " << num(l.lower * kRadToDeg) << ", upper: "
        << num(l.upper * kRadToDeg) << ", influence: " << num(l.influence * kRadToDeg) << ", gain: " << num(l.gain)
        << "}\n";
  }
  o << "  variant: " << to_string(c.variant) << '\n';
  o << "  kappa: " << map_record(c.kappa) << '\n';
  o << "  t0: " << num(c.t0) << "\n  epsilon: " << num(c.epsilon) << "\n  sigma: " << num(c.sigma) << '\n';
  o << "  switch_norm: " << control::to_string(c.switch_norm) << '\n';
  o << "design:\n";
  if (s.design.candidates.empty()) {
    o << "  candidates: []\n";
  } else {
    o << "  candidates:\n";
    for (const auto& r : s.design.candidates) o << "    - " << map_record(r) << '\n';
  }
  if (s.design.hint_is_closed_loop) {
    o << "  exponential_hint: closed_loop\n";
  } else if (s.design.exponential_hint) {
    o << "  exponential_hint: " << matrix(*s.design.exponential_hint) << '\n';
  } else {
    o << "  exponential_hint: none\n";
  }
  o << "  alpha: " << num(s.design.alpha) << "\n  check_horizon: " << num(s.design.check_horizon) << '\n';
  o << "initial:\n  q: " << list(s.q0, kRadToDeg) << "\n  qd: " << list(s.qd0, kRadToDeg) << '\n';
  o << "sim:\n  horizon: " << num(s.sim.horizon) << "\n  step: " << num(s.sim.step)
    << "\n  control_sampling: " << sim::to_string(s.sim.sampling) << "\n  max_refine: " << s.sim.max_refine
    << "\n  itc_horizon: " << num(s.sim.itc_horizon) << '\n';
  const auto& d = s.disturbance;
  o << "disturbance:\n  enabled: " << (d.enabled ? "true" : "false") << "\n  kind: wiener\n  std: " << num(d.std)
    << "\n  scaling: " << sim::to_string(d.scaling) << "\n  seed: " << d.seed << "\n  seeds: " << d.seeds << '\n';
  o << "output: " << s.output << '\n';
  return o.str();
}

std::vector<std::string> bundled_scenarios() {
  std::vector<std::string> names;
  for (const auto& b : kBundledScenarios) names.emplace_back(b.name);
  return names;
}

std::optional<std::string> bundled_scenario_text(const std::string& name) {
  for (const auto& b : kBundledScenarios)
    if (name == b.name) return std::string(b.text);
  return std::nullopt;
}

Scenario resolve_scenario(const std::string& name_or_path) {
  if (const auto text = bundled_scenario_text(name_or_path)) return parse_scenario(*text);
  return load_scenario_file(name_or_path);
}

dynamics::EulerLagrangeModel build_model(const Scenario& s) { return dynamics::two_link_model(s.params, s.form); }

control::ControlLaw build_itc(const Scenario& s, const dynamics::EulerLagrangeModel& model) {
  const auto& c = s.controller;
  if (c.itc == ItcKind::FeedbackLinearization) {
    if (!c.joint_limits.empty())
      throw ConfigError("controller.joint_limits", "joint limits are only available with the pd_gravity ITC");
    return control::feedback_linearization_itc(model, c.P, c.D, c.target);
  }
  control::LimitAccel limits;
  if (!c.joint_limits.empty()) limits = control::joint_limit_field(c.joint_limits, model.n);
  return control::pd_gravity_itc(model, c.P, c.D, c.target, limits);
}

timewarp::KappaMap build_kappa(const Scenario& s) { return timewarp::from_record(s.controller.kappa); }

control::ControlLaw build_law(const Scenario& s, const dynamics::EulerLagrangeModel& model, Variant variant) {
  const control::ControlLaw itc = build_itc(s, model);
  const auto& c = s.controller;
  switch (variant) {
    case Variant::Itc: return itc;
    case Variant::Ptc:
      return control::ptc_switching(itc, model, build_kappa(s), c.t0, c.epsilon, c.sigma, c.switch_norm);
    case Variant::PtcPure: return control::ptc_synthesize(itc, model, build_kappa(s), c.t0);
  }
  return itc;
}

sim::IntegrationOptions build_integration(const Scenario& s) {
  sim::IntegrationOptions o;
  o.t0 = s.controller.t0;
  o.horizon = s.sim.horizon;
  o.step = s.sim.step;
  o.sampling = s.sim.sampling;
  o.max_refine = s.sim.max_refine;
  o.scenario = s.name;
  return o;
}

}  // namespace ptc::cli
