#include "ptc/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "ptc/assess.hpp"
#include "ptc/cli/svg.hpp"
#include "ptc/lyapunov.hpp"
#include "ptc/verify.hpp"

namespace fs = std::filesystem;

namespace ptc::cli {

void apply_overrides(Scenario& s, const Overrides& o) {
  if (o.variant) s.controller.variant = *o.variant;
  if (o.disturbed) s.disturbance.enabled = true;
  if (o.seed) s.disturbance.seed = *o.seed;
  if (o.seeds) {
    if (*o.seeds < 1) throw ConfigError("--seeds", "must be >= 1");
    s.disturbance.seeds = *o.seeds;
    s.disturbance.enabled = true;
  }
  if (o.step) {
    if (!(*o.step > 0.0)) throw ConfigError("--step", "must be positive");
    s.sim.step = *o.step;
  }
  if (o.horizon) {
    if (!(*o.horizon > 0.0)) throw ConfigError("--horizon", "must be positive");
    s.sim.horizon = *o.horizon;
  }
}

std::string output_dir(const Scenario& s, const Overrides& o) {
  if (o.out) return *o.out;
  if (const char* root = std::getenv("PTC_OUT_ROOT"); root && *root) return (fs::path(root) / s.name).string();
  return s.output;
}

std::vector<std::uint64_t> seed_list(const Scenario& s) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < s.disturbance.seeds; ++i) seeds.push_back(s.disturbance.seed + static_cast<std::uint64_t>(i));
  return seeds;
}

// ---------------------------------------------------------------------------
// Simulation helpers

sim::Trajectory simulate(const Scenario& s, Variant variant, std::optional<std::uint64_t> seed) {
  const auto model = build_model(s);
  control::ControlLaw law = build_law(s, model, variant);
  const auto opt = build_integration(s);
  sim::DisturbanceModel dist = sim::NoDisturbance{};
  if (seed) dist = sim::WienerDisturbance{s.disturbance.std, *seed, s.disturbance.scaling};
  return sim::integrate(model, law, s.q0, s.qd0, dist, opt);
}

std::vector<sim::Trajectory> simulate_seeds(const Scenario& s, Variant variant,
                                            const std::vector<std::uint64_t>& seeds, unsigned threads) {
  std::vector<sim::Trajectory> out(seeds.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, seeds.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        out[i] = simulate(s, variant, seeds[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

RunSummary summarize(const sim::Trajectory& traj, const Scenario& s, const std::string& variant, bool disturbed) {
  RunSummary r;
  r.variant = variant;
  r.disturbed = disturbed;
  r.seed = traj.seed;
  r.label = variant + (disturbed ? "_seed" + std::to_string(traj.seed) : "");
  r.diverged = traj.diverged();
  r.switch_time = traj.switch_time();
  if (traj.size() == 0) return r;
  const Vec& target = s.controller.target;
  r.final_time = traj.times.back();
  r.final_error = (traj.q.back() - target).norm();
  const double e0 = (traj.q.front() - target).norm();
  std::size_t settle = traj.size();
  while (settle > 0 && (traj.q[settle - 1] - target).norm() <= 0.02 * e0) --settle;
  if (e0 > 0.0 && settle < traj.size()) r.settling_time = traj.times[settle];
  r.max_abs_q_deg.assign(static_cast<std::size_t>(traj.dof()), 0.0);
  for (const auto& q : traj.q)
    for (int i = 0; i < traj.dof(); ++i)
      r.max_abs_q_deg[static_cast<std::size_t>(i)] =
          std::max(r.max_abs_q_deg[static_cast<std::size_t>(i)], std::abs(q(i)) * kRadToDeg);
  for (const auto& l : s.controller.joint_limits)
    for (const auto& q : traj.q)
      if (q(l.joint) < l.lower || q(l.joint) > l.upper) r.limits_respected = false;
  return r;
}

nlohmann::json to_json(const RunSummary& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"label", r.label},
          {"variant", r.variant},
          {"disturbed", r.disturbed},
          {"seed", r.seed},
          {"final_time", r.final_time},
          {"final_error", r.final_error},
          {"switch_time", opt(r.switch_time)},
          {"settling_time", opt(r.settling_time)},
          {"max_abs_q_deg", r.max_abs_q_deg},
          {"diverged", r.diverged},
          {"limits_respected", r.limits_respected}};
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

void write_trajectory(const fs::path& path, const sim::Trajectory& traj, const std::string& domain) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  sim::write_csv(traj, f, domain);
}

std::vector<double> component(const std::vector<Vec>& v, int i, double scale = 1.0) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(x(i) * scale);
  return out;
}

std::vector<double> error_norm(const sim::Trajectory& traj, const Vec& target) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& q : traj.q) out.push_back((q - target).norm());
  return out;
}

std::string plot_run(const sim::Trajectory& traj, const std::string& title) {
  std::vector<Panel> panels(3);
  panels[0].ylabel = "q [deg]";
  panels[1].ylabel = "qd [deg/s]";
  panels[2].ylabel = "u [N m]";
  for (int i = 0; i < traj.dof(); ++i) {
    const std::string k = std::to_string(i + 1);
    panels[0].series.push_back({"q" + k, traj.times, component(traj.q, i, kRadToDeg), ""});
    panels[1].series.push_back({"qd" + k, traj.times, component(traj.qd, i, kRadToDeg), ""});
    panels[2].series.push_back({"u" + k, traj.times, component(traj.u, i), ""});
  }
  return render_panels(title, "t [s]", panels);
}

// ||q - q_d|| of every run, thin, plus the pointwise median.
Panel envelope_panel(const std::vector<sim::Trajectory>& runs, const Vec& target, const std::string& label,
                     const std::string& color) {
  Panel p;
  p.ylabel = "||q - q_d|| [rad] " + label;
  std::size_t shortest = runs.empty() ? 0 : runs.front().size();
  for (const auto& r : runs) {
    p.series.push_back({"", r.times, error_norm(r, target), color, 0.8, 0.35});
    shortest = std::min(shortest, r.size());
  }
  if (!runs.empty() && shortest > 0) {
    std::vector<double> median(shortest);
    std::vector<double> col(runs.size());
    for (std::size_t k = 0; k < shortest; ++k) {
      for (std::size_t i = 0; i < runs.size(); ++i) col[i] = (runs[i].q[k] - target).norm();
      std::nth_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(col.size() / 2), col.end());
      median[k] = col[col.size() / 2];
    }
    std::vector<double> t(runs.front().times.begin(), runs.front().times.begin() + static_cast<std::ptrdiff_t>(shortest));
    p.series.push_back({label + " median", t, median, color, 2.0, 1.0});
  }
  return p;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string describe(const RunSummary& r) {
  std::ostringstream o;
  o << std::setprecision(6) << r.label << ": ||q_e(" << r.final_time << ")|| = " << r.final_error;
  if (r.switch_time) o << ", switch at " << *r.switch_time << " s";
  if (r.settling_time) o << ", settles (2%) at " << *r.settling_time << " s";
  o << ", max|q| = [";
  for (std::size_t i = 0; i < r.max_abs_q_deg.size(); ++i) o << (i ? ", " : "") << r.max_abs_q_deg[i];
  o << "] deg" << (r.limits_respected ? "" : ", JOINT LIMIT VIOLATED") << (r.diverged ? ", DIVERGED" : "");
  return o.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// run

int cmd_run(const Scenario& s, const std::string& out_dir, std::ostream& log) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const Variant variant = s.controller.variant;
  const std::string vname = to_string(variant);
  std::vector<sim::Trajectory> runs;
  if (s.disturbance.enabled) {
    runs = simulate_seeds(s, variant, seed_list(s));
  } else {
    runs.push_back(simulate(s, variant, std::nullopt));
  }

  nlohmann::json summary{{"scenario", s.name}, {"variant", vname}, {"disturbed", s.disturbance.enabled}};
  summary["runs"] = nlohmann::json::array();
  std::ostringstream text;
  bool diverged = false;
  std::vector<double> finals;
  for (const auto& traj : runs) {
    const RunSummary r = summarize(traj, s, vname, s.disturbance.enabled);
    write_trajectory(dir / (r.label + ".csv"), traj, variant == Variant::Itc ? "itc" : "ptc");
    write_text(dir / (r.label + ".svg"), plot_run(traj, s.name + " / " + r.label));
    summary["runs"].push_back(to_json(r));
    text << describe(r) << '\n';
    log << describe(r) << '\n';
    diverged = diverged || r.diverged;
    finals.push_back(r.final_error);
  }
  if (runs.size() > 1) {
    const std::string color = variant == Variant::Itc ? "#d62728" : "#1f77b4";
    write_text(dir / (vname + "_envelope.svg"),
               render_panels(s.name + " / " + vname + " over " + std::to_string(runs.size()) + " seeds", "t [s]",
                             {envelope_panel(runs, s.controller.target, vname, color)}));
    summary["median_final_error"] = median(finals);
    text << "median ||q_e|| at the end: " << median(finals) << '\n';
  }
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  write_text(dir / "summary.txt", text.str());
  return diverged ? kExitDiverged : kExitOk;
}

// ---------------------------------------------------------------------------
// design

namespace {

std::string controller_fragment(const Scenario& s) {
  // The controller block of the canonical serialization.
  const std::string full = serialize_scenario(s);
  const auto begin = full.find("controller:\n");
  const auto end = full.find("design:\n");
  return full.substr(begin, end - begin);
}

}  // namespace

int cmd_design(const Scenario& s, const std::string& out_dir, std::ostream& log) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const auto model = build_model(s);
  const control::ControlLaw itc = build_itc(s, model);

  std::vector<timewarp::MuMap> candidates;
  for (const auto& r : s.design.candidates) candidates.emplace_back(timewarp::from_record(r));
  std::optional<Mat> hint = s.design.exponential_hint;
  if (s.design.hint_is_closed_loop) hint = lyapunov::closed_loop_matrix(s.controller.P, s.controller.D);

  verify::DesignOptions opt;
  opt.check.horizon = s.design.check_horizon;
  opt.check.step = s.sim.step;
  opt.check.max_refine = s.sim.max_refine;
  opt.check.t0 = s.controller.t0;
  opt.q0 = s.q0;
  opt.qd0 = s.qd0;
  opt.alpha = s.design.alpha;
  opt.switch_norm = s.controller.switch_norm;

  const double tau = s.controller.kappa.tau;
  std::optional<verify::DesignResult> result;
  try {
    result = verify::design_pipeline(model, itc, tau, candidates, s.controller.epsilon, s.controller.sigma, hint, opt);
  } catch (const NoCandidatePassed& e) {
    log << "design failed: " << e.what() << '\n';
    write_text(dir / "design_failure.txt", std::string(e.what()) + "\n");
    return kExitNoCandidate;
  }

  Scenario designed = s;
  designed.controller.kappa = timewarp::to_record(result->kappa);
  designed.controller.variant = Variant::Ptc;
  write_text(dir / "design_log.json", result->log.to_json().dump(2) + "\n");
  write_text(dir / "design_log.txt", result->log.to_text());
  write_text(dir / "controller.yaml", controller_fragment(designed));
  write_text(dir / "designed_scenario.yaml", serialize_scenario(designed));
  log << result->log.to_text();
  log << "controller written to " << (dir / "controller.yaml").string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const Scenario& s, const std::string& out_dir, std::ostream& log) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const auto model = build_model(s);
  const control::ControlLaw itc = build_itc(s, model);
  const timewarp::KappaMap kappa = build_kappa(s);
  const timewarp::MuMap mu(kappa);
  const auto& c = s.controller;

  nlohmann::json report{{"scenario", s.name}};
  report["checks"] = nlohmann::json::array();
  std::vector<std::string> warnings;
  bool all_ok = true;
  std::ostringstream text;
  auto record = [&](const std::string& name, bool passed, nlohmann::json detail) {
    report["checks"].push_back({{"name", name}, {"passed", passed}, {"detail", detail}});
    all_ok = all_ok && passed;
    text << (passed ? "PASS " : "FAIL ") << name << "  " << detail.dump() << '\n';
    log << (passed ? "PASS " : "FAIL ") << name << '\n';
  };

  // Time-warp class.
  {
    const auto k1 = timewarp::validate_class(kappa, timewarp::ClassTarget::K1);
    bool ok = k1.passed();
    nlohmann::json d{{"k1", k1.passed()}};
    if (!ok) {
      const bool k = timewarp::validate_class(kappa, timewarp::ClassTarget::K).passed();
      d["k"] = k;
      if (k) {
        const double slope = timewarp::eval_kappa(kappa, 0.0).d1;
        warnings.push_back("kappa is class K but not K1 (kappa'(0) = " + std::to_string(slope) +
                           "); PTC initial velocity scaled by kappa'(0)");
        ok = true;
      }
    }
    record("mapping_class", ok, d);
  }

  // Euler-Lagrange structure.
  {
    const auto p = dynamics::check_properties(model, 1000, 0);
    record("dynamics_properties", p.skew_ok() && p.linear_ok() && p.positive_definite(),
           {{"max_skew_residual", p.max_skew_residual},
            {"max_linearity_residual", p.max_linearity_residual},
            {"min_mass_eigenvalue", p.min_mass_eigenvalue}});
  }

  // Lyapunov certificate of the linear closed loop.
  {
    const Mat Q = lyapunov::closed_loop_matrix(c.P, c.D);
    const auto sol = lyapunov::solve_lyapunov(Q);
    bool ok = sol.residual <= 1e-10;
    nlohmann::json d{{"residual", sol.residual}, {"x_norm", sol.x_norm}};
    try {
      const auto env = lyapunov::envelope_check(Q, sol, 100.0, 201);
      d["max_envelope_ratio"] = env.max_ratio;
    } catch (const BoundViolated& e) {
      d["envelope_violation_t"] = e.time();
      ok = false;
    }
    record("lyapunov", ok, d);
  }

  // Nominal ITC run shared by the remaining checks.
  Scenario itc_s = s;
  itc_s.sim.horizon = s.sim.itc_horizon;
  const auto itc_opt = build_integration(itc_s);
  control::ControlLaw itc_law = itc;
  const sim::Trajectory itc_run = sim::integrate(model, itc_law, s.q0, s.qd0, sim::NoDisturbance{}, itc_opt);
  if (itc_run.diverged()) throw SimulationDiverged("nominal ITC run diverged");

  {
    const auto a = verify::check_assumption1(itc_run, model, itc, mu, c.t0);
    record("assumption1", a.satisfied, verify::to_json(a));
  }

  // Plain PTC up to tau - epsilon against the warped ITC run.
  const double kd0 = timewarp::eval_kappa(kappa, 0.0).d1;
  Scenario ptc_s = s;
  ptc_s.sim.horizon = std::min(s.sim.horizon, kappa.tau() - c.epsilon);
  control::ControlLaw ptc_law = control::ptc_synthesize(itc, model, kappa, c.t0);
  const sim::Trajectory ptc_run =
      sim::integrate(model, ptc_law, s.q0, kd0 * s.qd0, sim::NoDisturbance{}, build_integration(ptc_s));
  if (ptc_run.diverged()) throw SimulationDiverged("nominal PTC run diverged");
  {
    const auto m = assess::equivalence_mismatch(ptc_run, itc_run, kappa);
    record("time_warp_equivalence", m.samples > 0 && m.position <= 1e-3 && m.velocity <= 1e-2,
           {{"position", m.position}, {"velocity", m.velocity}, {"samples", m.samples},
            {"t_position", m.t_position}, {"t_velocity", m.t_velocity}});
  }
  {
    const auto w = assess::energy_output(model, c.P, c.target);
    const auto r = assess::compare_outputs(ptc_run, itc_run, kappa, w);
    record("output_equivalence", r.compared > 0 && r.within_tolerance && r.sign_preserved,
           {{"max_mismatch", r.max_mismatch}, {"tolerance", r.tolerance}, {"sign_checked", r.sign_checked},
            {"sign_violations", r.sign_violations}});
  }
  {
    const auto m = assess::mu_membership_check(itc_run, mu, model, itc);
    report["control_bound"] = {{"in_m_prime", m.in_m_prime},
                               {"in_m_double_prime", m.in_m_double_prime},
                               {"delta", m.bound_delta},
                               {"certified", m.certified}};
    text << "INFO control_bound delta = " << m.bound_delta << (m.certified ? " (certified)" : " (not certified)")
         << '\n';
  }

  write_trajectory(dir / "itc_nominal.csv", itc_run, "itc");
  write_trajectory(dir / "ptc_nominal.csv", ptc_run, "ptc");
  write_trajectory(dir / "itc_warped.csv", assess::warp_trajectory(itc_run, mu, &model), "warped");

  report["warnings"] = warnings;
  report["passed"] = all_ok;
  for (const auto& w : warnings) {
    text << "WARN " << w << '\n';
    log << "warning: " << w << '\n';
  }
  write_text(dir / "verify_report.json", report.dump(2) + "\n");
  write_text(dir / "verify_report.txt", text.str());
  return all_ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const Scenario& s, const std::string& out_dir, std::ostream& log) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const auto seeds = seed_list(s);
  const auto itc_runs = simulate_seeds(s, Variant::Itc, seeds);
  const auto ptc_runs = simulate_seeds(s, Variant::Ptc, seeds);

  nlohmann::json summary{{"scenario", s.name}, {"seeds", seeds}};
  summary["runs"] = nlohmann::json::array();
  std::vector<double> itc_final, ptc_final;
  bool diverged = false;
  bool limits = true;
  for (const auto* group : {&itc_runs, &ptc_runs}) {
    const std::string vname = group == &itc_runs ? "itc" : "ptc";
    for (const auto& traj : *group) {
      const RunSummary r = summarize(traj, s, vname, true);
      write_trajectory(dir / (r.label + ".csv"), traj, vname);
      summary["runs"].push_back(to_json(r));
      (group == &itc_runs ? itc_final : ptc_final).push_back(r.final_error);
      diverged = diverged || r.diverged;
      limits = limits && r.limits_respected;
    }
  }
  const double mi = median(itc_final);
  const double mp = median(ptc_final);
  summary["median_final_error"] = {{"itc", mi}, {"ptc", mp}};
  summary["median_ratio_ptc_over_itc"] = mi > 0.0 ? nlohmann::json(mp / mi) : nlohmann::json(nullptr);
  summary["max_ptc_final_error"] = ptc_final.empty() ? 0.0 : *std::max_element(ptc_final.begin(), ptc_final.end());
  summary["joint_limits_respected"] = limits;
  summary["any_diverged"] = diverged;
  write_text(dir / "sweep_summary.json", summary.dump(2) + "\n");
  write_text(dir / "sweep_envelope.svg",
             render_panels(s.name + " / " + std::to_string(seeds.size()) + " disturbed seeds", "t [s]",
                           {envelope_panel(itc_runs, s.controller.target, "itc", "#d62728"),
                            envelope_panel(ptc_runs, s.controller.target, "ptc", "#1f77b4")}));
  log << std::setprecision(6) << "median ||q_e|| at the end: itc " << mi << ", ptc " << mp;
  if (mi > 0.0) log << " (ratio " << mp / mi << ")";
  log << "\njoint limits respected in every run: " << (limits ? "yes" : "no") << '\n';
  return diverged ? kExitDiverged : kExitOk;
}

// ---------------------------------------------------------------------------
// entry point

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prescribed-time control toolkit"};
  app.require_subcommand(1);
  std::string scenario_arg;
  Overrides ov;
  std::string variant;
  std::uint64_t seed = 0;
  int seeds = 0;
  double step = 0.0, horizon = 0.0;
  std::string out_dir;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", scenario_arg, "bundled scenario name or YAML file")->required();
    sub->add_option("--seed", seed, "first disturbance seed");
    sub->add_option("--seeds", seeds, "number of disturbance seeds (implies --disturbed)");
    sub->add_option("--step", step, "integration step [s]");
    sub->add_option("--horizon", horizon, "simulated duration [s]");
    sub->add_option("--out", out_dir, "output directory");
  };
  auto* run = app.add_subcommand("run", "simulate the scenario's controller");
  add_common(run);
  run->add_option("--variant", variant, "itc | ptc | ptc_pure");
  run->add_flag("--disturbed", ov.disturbed, "add the Wiener disturbance");
  auto* design = app.add_subcommand("design", "run the design procedure");
  add_common(design);
  auto* verify = app.add_subcommand("verify", "run the verification suite");
  add_common(verify);
  auto* sweep = app.add_subcommand("sweep", "ITC vs PTC over disturbance seeds");
  add_common(sweep);
  app.add_subcommand("list", "list bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitInvalid;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->get_name() == "list") {
    for (const auto& n : bundled_scenarios()) out << n << '\n';
    return kExitOk;
  }

  try {
    if (sub->count("--seed")) ov.seed = seed;
    if (sub->count("--seeds")) ov.seeds = seeds;
    if (sub->count("--step")) ov.step = step;
    if (sub->count("--horizon")) ov.horizon = horizon;
    if (sub->count("--out")) ov.out = out_dir;
    if (sub->get_name() == "run" && run->count("--variant")) {
      try {
        ov.variant = variant_from_string(variant);
      } catch (const Error& e) {
        throw ConfigError("--variant", e.what());
      }
    }
    Scenario s = resolve_scenario(scenario_arg);
    apply_overrides(s, ov);
    if (sub->get_name() == "sweep") s.disturbance.enabled = true;
    const std::string dir = output_dir(s, ov);
    int code = kExitOk;
    if (sub == run) code = cmd_run(s, dir, out);
    if (sub == design) code = cmd_design(s, dir, out);
    if (sub == verify) code = cmd_verify(s, dir, out);
    if (sub == sweep) code = cmd_sweep(s, dir, out);
    out << "artifacts in " << dir << '\n';
    return code;
  } catch (const ConfigError& e) {
    err << "invalid scenario: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const SimulationDiverged& e) {
    err << "simulation diverged: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const NoCandidatePassed& e) {
    err << "design failed: " << e.what() << '\n';
    return kExitNoCandidate;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace ptc::cli
