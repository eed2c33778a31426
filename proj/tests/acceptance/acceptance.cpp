// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ptc/assess.hpp"
#include "ptc/cli/commands.hpp"
#include "ptc/cli/scenario.hpp"
#include "ptc/errors.hpp"
#include "ptc/lyapunov.hpp"
#include "ptc/timewarp.hpp"
#include "ptc/verify.hpp"

using namespace ptc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double error_at_end(const sim::Trajectory& t, const Vec& target) { return (t.q.back() - target).norm(); }

double max_abs_q2_deg(const sim::Trajectory& t) {
  double m = 0.0;
  for (const auto& q : t.q) m = std::max(m, std::abs(q(1)) * kRadToDeg);
  return m;
}

cli::Scenario bundled() { return cli::parse_scenario(*cli::bundled_scenario_text("two_link_fig2")); }

// Runs collected by criteria 2 and 3 (and their design-pipeline replay) for
// the joint-limit check.
struct RunPool {
  std::vector<const sim::Trajectory*> runs;
  std::vector<sim::Trajectory> storage;
};

// ---------------------------------------------------------------------------

Outcome time_warp_equivalence() {
  const auto s = bundled();
  const auto model = cli::build_model(s);
  auto itc = cli::build_itc(s, model);
  auto ptc = cli::build_law(s, model, cli::Variant::PtcPure);
  auto opt = cli::build_integration(s);
  const auto ptc_run = sim::integrate(model, ptc, s.q0, s.qd0, sim::NoDisturbance{}, opt);
  opt.horizon = 200.0;
  const auto itc_run = sim::integrate(model, itc, s.q0, s.qd0, sim::NoDisturbance{}, opt);
  if (ptc_run.diverged() || itc_run.diverged()) return {false, "a run diverged"};
  const auto mm = assess::equivalence_mismatch(ptc_run, itc_run, cli::build_kappa(s));
  return {mm.position <= 1e-3 && mm.velocity <= 1e-2,
          fmt("position %.3g rad (<= 1e-3), velocity %.3g rad/s (<= 1e-2), %zu samples", mm.position,
              mm.velocity, mm.samples)};
}

Outcome nominal_convergence(const cli::Scenario& s, RunPool& pool) {
  const auto ptc = cli::simulate(s, cli::Variant::Ptc, std::nullopt);
  const auto itc = cli::simulate(s, cli::Variant::Itc, std::nullopt);
  pool.storage.push_back(ptc);
  pool.storage.push_back(itc);
  const double ep = error_at_end(ptc, s.controller.target), ei = error_at_end(itc, s.controller.target);
  const bool ok = !ptc.diverged() && !itc.diverged() && ep <= 1e-2 && ei >= 5.0 * ep;
  return {ok, fmt("PTC %.3g rad (<= 1e-2), ITC %.3g rad (>= 5x PTC)", ep, ei)};
}

Outcome disturbance_rejection(cli::Scenario s, RunPool& pool) {
  s.disturbance.enabled = true;
  s.disturbance.seeds = 20;
  const auto seeds = cli::seed_list(s);
  const auto ptc = cli::simulate_seeds(s, cli::Variant::Ptc, seeds);
  const auto itc = cli::simulate_seeds(s, cli::Variant::Itc, seeds);
  std::vector<double> ep, ei;
  bool diverged = false;
  for (const auto& r : ptc) {
    ep.push_back(error_at_end(r, s.controller.target));
    diverged = diverged || r.diverged();
  }
  for (const auto& r : itc) {
    ei.push_back(error_at_end(r, s.controller.target));
    diverged = diverged || r.diverged();
  }
  for (auto& r : ptc) pool.storage.push_back(r);
  for (auto& r : itc) pool.storage.push_back(r);
  const double mp = median(ep), mi = median(ei), worst = *std::max_element(ep.begin(), ep.end());
  const bool ok = !diverged && mp <= 0.1 * mi && worst <= 5e-2;
  return {ok, fmt("%zu seeds, median PTC %.3g / median ITC %.3g = %.3g (<= 0.1), worst PTC %.3g rad (<= 5e-2)%s",
                  seeds.size(), mp, mi, mp / mi, worst, diverged ? ", DIVERGED" : "")};
}

Outcome joint_limits(const RunPool& pool) {
  double worst = 0.0;
  for (const auto& r : pool.storage) worst = std::max(worst, max_abs_q2_deg(r));
  return {!pool.storage.empty() && worst <= 3.0,
          fmt("%zu runs, max |q2| = %.4f deg (<= 3)", pool.storage.size(), worst)};
}

Outcome lyapunov_machinery() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n;
  double worst_residual = 0.0, worst_ratio = 0.0;
  int solved = 0;
  while (solved < 200) {
    const int dim = 2 + static_cast<int>(rng() % 7);
    Mat A(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) A(i, j) = n(rng) / std::sqrt(dim);
    const Mat Q = A - (lyapunov::spectral_abscissa(A) + 0.2 + std::abs(n(rng))) * Mat::Identity(dim, dim);
    lyapunov::LyapunovSolution x;
    try {
      x = lyapunov::solve_lyapunov(Q);
    } catch (const IllConditioned&) {
      continue;
    }
    ++solved;
    worst_residual = std::max(worst_residual, x.residual);
    try {
      worst_ratio = std::max(worst_ratio, lyapunov::envelope_check(Q, x, 100.0, 1001).max_ratio);
    } catch (const BoundViolated& e) {
      return {false, fmt("envelope violated at t = %.4g for a %dx%d matrix", e.time(), dim, dim)};
    }
  }
  Mat Q(2, 2);
  Q << 0, 1, -0.1, -1;
  Mat X(2, 2);
  X << 5.55, 5, 5, 5.5;
  const auto hand = lyapunov::solve_lyapunov(Q);
  const double hand_err = (hand.X - X).cwiseAbs().maxCoeff();
  const bool ok = worst_residual <= 1e-10 && hand_err <= 1e-10 && worst_ratio <= 1.0 + 1e-8;
  return {ok, fmt("max residual %.3g (<= 1e-10), hand case error %.3g, max envelope ratio %.4f", worst_residual,
                  hand_err, worst_ratio)};
}

Outcome mapping_identities() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> coef(0.2, 3.0), upper(2.0, 3.0), horizon(0.5, 30.0);
  auto expo = [&] { return rng() % 2 ? 1.0 : upper(rng); };
  double worst_rt = 0.0, worst_d1 = 0.0, worst_d2 = 0.0, worst_inv = 0.0;
  std::size_t saturated = 0, checked = 0, k1_wrong = 0, draws = 0;

  for (int family = 0; family < 3; ++family) {
    for (int draw = 0; draw < 1000; ++draw, ++draws) {
      const double tau = horizon(rng);
      const int terms = 1 + static_cast<int>(rng() % 3);
      timewarp::KappaMap::Shape shape;
      if (family == 0) {
        timewarp::RationalSum r;
        for (int i = 0; i < terms; ++i) r.terms.push_back({coef(rng), i == 0 ? 1.0 : expo(), expo()});
        shape = r;
      } else if (family == 1) {
        timewarp::LogSum l;
        for (int i = 0; i < terms; ++i) l.a.push_back(coef(rng));
        shape = l;
      } else {
        timewarp::TanSum t;
        for (int i = 0; i < terms; ++i) t.terms.push_back({coef(rng), i == 0 ? 1.0 : expo()});
        shape = t;
      }
      const timewarp::KappaMap k(shape, tau);
      const timewarp::MuMap mu(k);

      // Round trip on the log grid. Past kappa at the last double below tau
      // no preimage exists; there mu must sit on that last double.
      const double last_t = std::nextafter(tau, 0.0);
      const double top = timewarp::eval_kappa_unclamped(k, last_t).value;
      for (double e = -3.0; e <= 4.0 + 1e-12; e += 0.25) {
        const double s = std::pow(10.0, e);
        const auto m = timewarp::eval_mu(mu, s);
        if (!(m.value >= 0.0 && m.value < tau)) return {false, "mu left [0, tau)"};
        if (s >= top) {
          ++saturated;
          if (m.value < std::nextafter(last_t, 0.0)) return {false, fmt("saturated mu off the last double, s=%g", s)};
          continue;
        }
        ++checked;
        const auto back = timewarp::eval_kappa_unclamped(k, m.value);
        const double ulp = last_t - tau;
        const double excess = std::abs(back.value - s) - 4.0 * std::abs(back.d1 * ulp);
        worst_rt = std::max(worst_rt, excess / std::max(1.0, s));
      }

      // Inverse-derivative identities on [0, 0.999 tau).
      for (int g = 0; g < 40; ++g) {
        const double t = 0.999 * tau * g / 40.0;
        const auto kj = timewarp::eval_kappa(k, t);
        const auto m = timewarp::eval_mu(mu, kj.value);
        worst_inv = std::max(worst_inv, std::abs(m.value - t) / std::max(1.0, t));
        const auto at = timewarp::eval_kappa(k, m.value);
        worst_d1 = std::max(worst_d1, std::abs(m.d1 - 1.0 / at.d1));
        worst_d2 = std::max(worst_d2, std::abs(at.d2 * m.d1 * m.d1 + at.d1 * m.d2));
      }

      // K1: rescale to unit initial slope, the validator must accept; the
      // unscaled map must be rejected unless its slope already is one.
      const double slope = timewarp::eval_kappa(k, 0.0).d1;
      auto unit = shape;
      std::visit(
          [&](auto& sh) {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, timewarp::LogSum>)
              for (double& a : sh.a) a /= slope;
            else if constexpr (std::is_same_v<T, timewarp::RationalSum> || std::is_same_v<T, timewarp::TanSum>)
              for (auto& term : sh.terms) term.a /= slope;
          },
          unit);
      const timewarp::KappaMap k1(unit, tau);
      timewarp::ValidationGrid grid;
      grid.uniform_points = 2000;
      const auto v1 = timewarp::validate_class(k1, timewarp::ClassTarget::K1, grid);
      const auto v0 = timewarp::validate_class(k, timewarp::ClassTarget::K1, grid);
      const bool expect0 = std::abs(slope - 1.0) <= 1e-9;
      if (!v1.passed() || v0.passed() != expect0) ++k1_wrong;
      if (v1.passed() && std::abs(timewarp::eval_kappa(k1, 0.0).d1 - 1.0) > 1e-9) ++k1_wrong;
    }
  }
  const bool ok = worst_rt <= 1e-8 && worst_inv <= 1e-9 && worst_d1 <= 1e-8 && worst_d2 <= 1e-6 && k1_wrong == 0;
  return {ok, fmt("%zu draws; round trip excess %.2g (<= 1e-8) on %zu points, %zu saturated points pinned; "
                  "mu(kappa(t)) %.2g, mu' identity %.2g, mu'' identity %.2g; K1 verdict errors %zu",
                  draws, worst_rt, checked, saturated, worst_inv, worst_d1, worst_d2, k1_wrong)};
}

Outcome dynamics_properties() {
  const auto s = bundled();
  const auto rep = dynamics::check_properties(cli::build_model(s), 1000, 7);
  return {rep.skew_ok() && rep.linear_ok() && rep.positive_definite(),
          fmt("1000 states, skew %.3g (<= 1e-6), linearity %.3g (<= 1e-10), min eig(M) %.3g",
              rep.max_skew_residual, rep.max_linearity_residual, rep.min_mass_eigenvalue)};
}

Outcome output_equivalence() {
  const auto s = bundled();
  const auto model = cli::build_model(s);
  auto itc = cli::build_itc(s, model);
  auto ptc = cli::build_law(s, model, cli::Variant::PtcPure);
  auto opt = cli::build_integration(s);
  const auto ptc_run = sim::integrate(model, ptc, s.q0, s.qd0, sim::NoDisturbance{}, opt);
  opt.horizon = 200.0;
  const auto itc_run = sim::integrate(model, itc, s.q0, s.qd0, sim::NoDisturbance{}, opt);
  const auto w = assess::energy_output(model, s.controller.P, s.controller.target);
  const auto c = assess::compare_outputs(ptc_run, itc_run, cli::build_kappa(s), w, 10);
  return {c.within_tolerance && c.sign_preserved,
          fmt("max mismatch %.3g (<= %.3g), sign violations %zu of %zu", c.max_mismatch, c.tolerance,
              c.sign_violations, c.sign_checked)};
}

Outcome design_pipeline() {
  const fs::path dir = fs::temp_directory_path() / "ptc_acceptance_design";
  fs::remove_all(dir);
  std::ostringstream log;
  const int code = cli::cmd_design(bundled(), dir.string(), log);
  if (code != cli::kExitOk) return {false, fmt("design exited %d", code)};
  const auto designed = cli::load_scenario_file((dir / "designed_scenario.yaml").string());
  RunPool pool;
  const auto c2 = nominal_convergence(designed, pool);
  const auto c3 = disturbance_rejection(designed, pool);
  const auto c4 = joint_limits(pool);

  // Lyapunov route on the feedback-linearized loop.
  const auto s = bundled();
  const auto model = cli::build_model(s);
  const auto fl = control::feedback_linearization_itc(model, s.controller.P, s.controller.D, s.controller.target);
  verify::DesignOptions opt;
  opt.q0 = s.q0;
  opt.qd0 = s.qd0;
  opt.check.horizon = s.design.check_horizon;
  const auto hinted = verify::design_pipeline(model, fl, s.controller.kappa.tau, {}, s.controller.epsilon,
                                              s.controller.sigma,
                                              lyapunov::closed_loop_matrix(s.controller.P, s.controller.D), opt);
  verify::CheckOptions check;
  check.horizon = s.design.check_horizon;
  const auto rep = verify::check_assumption1(model, fl, timewarp::MuMap(hinted.kappa), s.q0, s.qd0, check);
  const bool ok = c2.pass && c3.pass && c4.pass && hinted.log.used_exponential_hint && rep.satisfied;
  return {ok, fmt("designed controller: [%s] [%s] [%s]; exponential hint: |X| = %.4g, assumption %s at t~ = %.3g",
                  c2.pass ? "2 ok" : "2 FAIL", c3.pass ? "3 ok" : "3 FAIL", c4.pass ? "4 ok" : "4 FAIL",
                  hinted.log.lyapunov->x_norm, rep.satisfied ? "holds" : "fails", rep.t_tilde)};
}

Outcome consistency_identities() {
  const auto s = bundled();
  const auto model = cli::build_model(s);
  const auto& P = s.controller.P;
  const auto& D = s.controller.D;
  const auto& target = s.controller.target;
  const auto kappa = cli::build_kappa(s);
  const auto pd = control::ptc_synthesize(control::pd_gravity_itc(model, P, D, target), model, kappa, 0.0);
  const auto fl =
      control::ptc_synthesize(control::feedback_linearization_itc(model, P, D, target), model, kappa, 0.0);
  std::mt19937_64 rng(10);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> tt(0.0, 0.999 * kappa.tau());
  double worst_pd = 0.0, worst_fl = 0.0;
  for (int i = 0; i < 10000; ++i) {
    Vec q(2), qd(2);
    q << n(rng), n(rng);
    qd << n(rng), n(rng);
    const double t = i % 10 == 0 ? kappa.tau() + std::abs(n(rng)) : tt(rng);
    const Vec a = control::scheduled_pd_gravity(control::pd_gravity_schedule(P, D, model, kappa, 0.0, t, q), model,
                                                target, qd, q);
    const Vec b = pd(qd, q, t);
    worst_pd = std::max(worst_pd, (a - b).norm() / (1.0 + b.norm()));
    const Vec c = control::scheduled_feedback_linearization(
        control::feedback_linearization_schedule(P, D, kappa, 0.0, t), model, target, qd, q);
    const Vec d = fl(qd, q, t);
    worst_fl = std::max(worst_fl, (c - d).norm() / (1.0 + d.norm()));
  }
  return {worst_pd <= 1e-10 && worst_fl <= 1e-10,
          fmt("10000 samples, relative deviation pd+gravity %.3g, feedback linearization %.3g (<= 1e-10)", worst_pd,
              worst_fl)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // <= 0: no limit
    std::function<Outcome()> run;
  };
  RunPool pool;
  const auto s = bundled();
  const std::vector<Criterion> criteria{
      {1, "time-warp equivalence", 30.0, time_warp_equivalence},
      {2, "prescribed-time convergence", 10.0, [&] { return nominal_convergence(s, pool); }},
      {3, "disturbance rejection", 120.0, [&] { return disturbance_rejection(s, pool); }},
      {4, "joint-limit avoidance", 0.0, [&] { return joint_limits(pool); }},
      {5, "lyapunov machinery", 10.0, lyapunov_machinery},
      {6, "mapping identities", 10.0, mapping_identities},
      {7, "dynamics properties", 5.0, dynamics_properties},
      {8, "output equivalence", 30.0, output_equivalence},
      {9, "design pipeline", 120.0, design_pipeline},
      {10, "consistency identities", 5.0, consistency_identities},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_s <= 0.0 || secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::string limit = c.limit_s > 0 ? fmt(" < %gs", c.limit_s) : "";
    std::printf("criterion %2d %-28s %s  %s [%.2fs%s%s]\n", c.id, c.name, pass ? "PASS" : "FAIL", o.detail.c_str(),
                secs, limit.c_str(), in_time ? "" : " EXCEEDED");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
