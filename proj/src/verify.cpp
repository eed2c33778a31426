#include "ptc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ptc/errors.hpp"

namespace ptc::verify {

std::string to_string(Branch b) {
  switch (b) {
    case Branch::None: return "none";
    case Branch::AccelBound: return "accel_bound";
    case Branch::ControlBound: return "control_bound";
    case Branch::Both: return "both";
  }
  return "none";
}

std::size_t first_persistent(const std::vector<bool>& flags) {
  std::size_t k = flags.size();
  while (k > 0 && flags[k - 1]) --k;
  return k;
}

AssumptionReport check_assumption1(const sim::Trajectory& run, const dynamics::EulerLagrangeModel& model,
                                   const control::ControlLaw& itc, const timewarp::MuMap& mu, double t0) {
  if (run.size() == 0) throw DomainError("empty trajectory");
  if (run.diverged()) throw SimulationDiverged("ITC run diverged before the assumption check");
  const std::size_t n = run.size();
  AssumptionReport r;
  r.horizon = run.times.back() - t0;
  r.times.resize(n);
  r.velocity_margin.resize(n);
  r.accel_margin.resize(n);
  r.control_margin.resize(n);
  std::vector<bool> vel_ok(n), acc_ok(n), ctl_ok(n);
  const Vec zero = Vec::Zero(model.n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = run.times[k] - t0;
    const double md = timewarp::eval_mu(mu, s).d1;
    const Vec& q = run.q[k];
    const Vec& qd = run.qd[k];
    const Vec f = itc(qd, q, run.times[k]);
    const Vec qdd = dynamics::forward_dynamics(model, q, qd, f, zero);
    r.times[k] = run.times[k];
    r.velocity_margin[k] = md - qd.norm();
    r.accel_margin[k] = md * md - qdd.norm();
    r.control_margin[k] = md * md - f.norm();
    vel_ok[k] = r.velocity_margin[k] >= 0.0;
    acc_ok[k] = r.accel_margin[k] >= 0.0;
    ctl_ok[k] = r.control_margin[k] >= 0.0;
  }
  const std::size_t kv = first_persistent(vel_ok);
  const std::size_t ka = std::max(kv, first_persistent(acc_ok));
  const std::size_t kc = std::max(kv, first_persistent(ctl_ok));
  const std::size_t best = std::min(ka, kc);
  const double half = t0 + 0.5 * r.horizon;
  auto qualifies = [&](std::size_t k) { return k < n && run.times[k] < half; };
  if (best >= n) {
    r.t_tilde = r.horizon;
    return r;
  }
  r.t_tilde = run.times[best] - t0;
  r.satisfied = qualifies(best);
  if (qualifies(ka) && qualifies(kc)) {
    r.which_branch = Branch::Both;
  } else if (ka <= kc) {
    r.which_branch = Branch::AccelBound;
  } else {
    r.which_branch = Branch::ControlBound;
  }
  return r;
}

AssumptionReport check_assumption1(const dynamics::EulerLagrangeModel& model, const control::ControlLaw& itc,
                                   const timewarp::MuMap& mu, const Vec& q0, const Vec& qd0,
                                   const CheckOptions& options) {
  if (itc.kind() != control::LawKind::Itc) throw DomainError("assumption check expects an ITC");
  sim::IntegrationOptions opt;
  opt.t0 = options.t0;
  opt.horizon = options.horizon;
  opt.step = options.step;
  opt.max_refine = options.max_refine;
  control::ControlLaw law = itc;
  const sim::Trajectory run = sim::integrate(model, law, q0, qd0, sim::NoDisturbance{}, opt);
  if (run.diverged()) throw SimulationDiverged("nominal ITC run diverged");
  return check_assumption1(run, model, itc, mu, options.t0);
}

// ---------------------------------------------------------------------------
// Lemma 2 tail check

namespace {

// Sup of `v` on five log-spaced windows covering [horizon / 10, horizon].
bool tail_decays(const std::vector<double>& times, const std::vector<double>& v, double horizon) {
  constexpr int kWindows = 5;
  std::vector<double> sup(kWindows, 0.0);
  std::vector<bool> seen(kWindows, false);
  const double lo = horizon / 10.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < lo || times[k] > horizon) continue;
    int w = static_cast<int>(std::floor(std::log10(times[k] / lo) * kWindows));
    w = std::clamp(w, 0, kWindows - 1);
    if (!std::isfinite(v[k])) return false;
    sup[w] = seen[w] ? std::max(sup[w], v[k]) : v[k];
    seen[w] = true;
  }
  std::vector<double> s;
  for (int w = 0; w < kWindows; ++w)
    if (seen[w]) s.push_back(sup[w]);
  if (s.size() < 2) return false;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] > s[i - 1] * (1.0 + 1e-12) + 1e-300) return false;
  return s.back() <= 1e-300 || s.back() <= 0.5 * s.front();
}

}  // namespace

Lemma2Report lemma2_finite_check(const std::vector<double>& times, const std::vector<double>& r_norm,
                                 const timewarp::MuMap& mu, const timewarp::MuMap& eta, double alpha,
                                 double horizon) {
  if (times.size() != r_norm.size()) throw DomainError("lemma2 check: times/values size mismatch");
  if (!(alpha >= 1.0)) throw DomainError("lemma2 check requires alpha >= 1");
  Lemma2Report rep;
  std::vector<bool> premise(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    const double r = r_norm[k];
    premise[k] = r <= timewarp::eval_mu(mu, t).d1;
    const timewarp::Jet e = timewarp::eval_mu(eta, t);
    const double scale = std::pow(e.d1, alpha);
    rep.times.push_back(t);
    rep.first.push_back(r == 0.0 ? 0.0 : -e.d2 / scale * r);
    rep.second.push_back(r == 0.0 ? 0.0 : r / scale);
  }
  const std::size_t k0 = first_persistent(premise);
  rep.premise_holds = k0 < times.size() && times[k0] < 0.5 * horizon;
  rep.premise_from = k0 < times.size() ? times[k0] : horizon;
  rep.first_decays = tail_decays(rep.times, rep.first, horizon);
  rep.second_decays = tail_decays(rep.times, rep.second, horizon);
  return rep;
}

timewarp::MuMap lemma2_eta(const timewarp::MuMap& mu, double alpha) {
  if (!(alpha >= 1.0)) throw DomainError("lemma2 eta requires alpha >= 1");
  const auto& k = mu.kappa();
  double beta = 0.0;
  if (const auto* e = std::get_if<timewarp::ExpInverse>(&k.shape())) {
    beta = e->alpha / e->x_norm;
  } else if (const auto* l = std::get_if<timewarp::LogSum>(&k.shape())) {
    double a = 0.0;
    for (double ai : l->a) a += ai;
    beta = 1.0 / a;
  } else {
    throw DomainError("lemma2 eta needs an exponential mu (exp_inverse or log_sum)");
  }
  // eta'(s)^(alpha+1) = (alpha+1) tau exp(-beta s), so eta is again exponential.
  const double rate = beta / (alpha + 1.0);
  const double horizon = std::pow((alpha + 1.0) * k.tau(), 1.0 / (alpha + 1.0)) / rate;
  constexpr double kShape = 0.25;
  return timewarp::MuMap(timewarp::KappaMap(timewarp::ExpInverse{kShape, kShape / rate}, horizon));
}

// ---------------------------------------------------------------------------
// Design pipeline

nlohmann::json to_json(const timewarp::MapRecord& r) {
  return {{"family", r.family}, {"terms", r.terms}, {"tau", r.tau}};
}

nlohmann::json to_json(const AssumptionReport& r, bool with_series) {
  nlohmann::json j{{"satisfied", r.satisfied},
                   {"t_tilde", r.t_tilde},
                   {"which_branch", to_string(r.which_branch)},
                   {"horizon", r.horizon}};
  auto min_from = [&](const std::vector<double>& v) {
    double m = INFINITY;
    for (std::size_t k = 0; k < v.size(); ++k)
      if (r.times[k] - r.times.front() >= r.t_tilde) m = std::min(m, v[k]);
    return std::isfinite(m) ? nlohmann::json(m) : nlohmann::json(nullptr);
  };
  j["min_velocity_margin_after_t_tilde"] = min_from(r.velocity_margin);
  j["min_accel_margin_after_t_tilde"] = min_from(r.accel_margin);
  j["min_control_margin_after_t_tilde"] = min_from(r.control_margin);
  if (with_series) {
    j["times"] = r.times;
    j["velocity_margin"] = r.velocity_margin;
    j["accel_margin"] = r.accel_margin;
    j["control_margin"] = r.control_margin;
  }
  return j;
}

nlohmann::json DesignLog::to_json() const {
  nlohmann::json j;
  j["used_exponential_hint"] = used_exponential_hint;
  j["settle_error"] = settle_error;
  if (lyapunov) {
    const auto& l = *lyapunov;
    std::vector<std::vector<double>> x(static_cast<std::size_t>(l.X.rows()));
    for (Eigen::Index i = 0; i < l.X.rows(); ++i)
      for (Eigen::Index c = 0; c < l.X.cols(); ++c) x[static_cast<std::size_t>(i)].push_back(l.X(i, c));
    j["lyapunov"] = {{"X", x}, {"x_norm", l.x_norm}, {"residual", l.residual}};
  }
  j["candidates"] = nlohmann::json::array();
  for (const auto& c : candidates)
    j["candidates"].push_back({{"mapping", verify::to_json(c.mapping)}, {"report", verify::to_json(c.report)}});
  j["chosen"] = chosen ? nlohmann::json(*chosen) : nlohmann::json(nullptr);
  j["steps"] = steps;
  j["warnings"] = warnings;
  return j;
}

std::string DesignLog::to_text() const {
  std::ostringstream o;
  o << "design log\n";
  for (const auto& s : steps) o << "  - " << s << '\n';
  o << "ITC settle error: " << settle_error << '\n';
  if (lyapunov) o << "Lyapunov ||X|| = " << lyapunov->x_norm << ", residual " << lyapunov->residual << '\n';
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    o << "candidate " << i << ": " << c.mapping.family << " tau=" << c.mapping.tau << " terms=";
    for (const auto& row : c.mapping.terms) {
      o << '[';
      for (std::size_t k = 0; k < row.size(); ++k) o << (k ? "," : "") << row[k];
      o << ']';
    }
    o << "  satisfied=" << (c.report.satisfied ? "yes" : "no") << " t_tilde=" << c.report.t_tilde
      << " branch=" << to_string(c.report.which_branch) << (chosen && *chosen == i ? "  <- chosen" : "") << '\n';
  }
  for (const auto& w : warnings) o << "warning: " << w << '\n';
  return o.str();
}

DesignResult design_pipeline(const dynamics::EulerLagrangeModel& model, const control::ControlLaw& itc,
                             double tau, const std::vector<timewarp::MuMap>& mu_candidates, double epsilon,
                             double sigma, const std::optional<Mat>& exponential_hint,
                             const DesignOptions& options) {
  if (itc.kind() != control::LawKind::Itc) throw DomainError("design pipeline expects an ITC");
  if (!(tau > 0.0)) throw DomainError("design pipeline needs tau > 0");
  if (!exponential_hint && mu_candidates.empty())
    throw NoCandidatePassed("no mu candidates given and no exponential hint");
  const Vec q0 = options.q0.size() ? options.q0 : Vec::Zero(model.n);
  const Vec qd0 = options.qd0.size() ? options.qd0 : Vec::Zero(model.n);
  const Vec& target = itc.metadata().target;

  DesignLog log;
  log.steps.push_back("step 1: tau = " + std::to_string(tau) + " s, ITC '" + itc.metadata().itc_name + "'");

  // One nominal ITC run serves both the settle check and every candidate.
  sim::IntegrationOptions opt;
  opt.t0 = options.check.t0;
  opt.horizon = options.check.horizon;
  opt.step = options.check.step;
  opt.max_refine = options.check.max_refine;
  control::ControlLaw law = itc;
  const sim::Trajectory run = sim::integrate(model, law, q0, qd0, sim::NoDisturbance{}, opt);
  if (run.diverged()) throw SimulationDiverged("nominal ITC run diverged during the settle check");
  auto err = [&](std::size_t k) {
    return std::sqrt((run.q[k] - target).squaredNorm() + run.qd[k].squaredNorm());
  };
  log.settle_error = err(run.size() - 1);
  if (!(log.settle_error <= options.settle_tol * std::max(1.0, err(0))))
    throw DomainError("ITC does not settle on the nominal model (final error " +
                      std::to_string(log.settle_error) + ")");

  std::optional<timewarp::KappaMap> chosen;
  if (exponential_hint) {
    log.used_exponential_hint = true;
    const auto sol = lyapunov::solve_lyapunov(*exponential_hint);
    log.lyapunov = sol;
    const auto kappa = lyapunov::exponential_mu(tau, sol.x_norm, options.alpha);
    log.steps.push_back("step 2: exponentially stable ITC, mu from the Lyapunov solution (||X|| = " +
                        std::to_string(sol.x_norm) + ", alpha = " + std::to_string(options.alpha) + ")");
    DesignLog::Candidate c{timewarp::to_record(kappa),
                           check_assumption1(run, model, itc, timewarp::MuMap(kappa), options.check.t0)};
    if (!c.report.satisfied) log.warnings.push_back("Lyapunov-built mu does not pass the finite-horizon assumption check");
    log.candidates.push_back(std::move(c));
    log.chosen = 0;
    chosen = kappa;
  } else {
    log.steps.push_back("step 2: no exponential hint, trying " + std::to_string(mu_candidates.size()) +
                        " candidate(s)");
    for (std::size_t i = 0; i < mu_candidates.size(); ++i) {
      const auto& mu = mu_candidates[i];
      DesignLog::Candidate c{timewarp::to_record(mu.kappa()),
                             check_assumption1(run, model, itc, mu, options.check.t0)};
      const bool ok = c.report.satisfied;
      log.steps.push_back("steps 3-4: candidate " + std::to_string(i) + (ok ? " satisfies" : " fails") +
                          " the assumption");
      log.candidates.push_back(std::move(c));
      if (ok) {
        log.chosen = i;
        chosen = mu.kappa();
        break;
      }
    }
    if (!chosen) throw NoCandidatePassed("no mu candidate satisfies the assumption");
  }

  control::ControlLaw ptc = control::ptc_switching(itc, model, *chosen, options.check.t0, epsilon, sigma,
                                                   options.switch_norm);
  for (const auto& w : ptc.metadata().warnings) log.warnings.push_back(w);
  log.steps.push_back("steps 5-6: switching PTC with epsilon = " + std::to_string(epsilon) +
                      " s, sigma = " + std::to_string(sigma));
  return DesignResult{std::move(ptc), *chosen, std::move(log)};
}

}  // namespace ptc::verify
