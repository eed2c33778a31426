#include "ptc/assess.hpp"

#include <algorithm>
#include <cmath>

#include "ptc/errors.hpp"
#include "ptc/verify.hpp"

namespace ptc::assess {

sim::Trajectory warp_trajectory(const sim::Trajectory& itc, const timewarp::MuMap& mu,
                                const dynamics::EulerLagrangeModel* model) {
  sim::Trajectory out;
  out.scenario = itc.scenario;
  out.seed = itc.seed;
  if (itc.size() == 0) return out;
  const double t0 = itc.times.front();
  for (std::size_t k = 0; k < itc.size(); ++k) {
    const timewarp::Jet m = timewarp::eval_mu(mu, itc.times[k] - t0);
    out.times.push_back(t0 + m.value);
    out.q.push_back(itc.q[k]);
    out.qd.push_back(itc.qd[k] / m.d1);
    if (model) {
      const double m2 = m.d1 * m.d1;
      const Vec g = model->gravity(itc.q[k]);
      out.u.push_back(itc.u[k] / m2 - (m.d2 / (m2 * m.d1)) * (model->mass(itc.q[k]) * itc.qd[k]) +
                      (1.0 - 1.0 / m2) * g);
      out.d.push_back(itc.d[k] / m2);
    } else {
      out.u.push_back(itc.u[k]);
      out.d.push_back(itc.d[k]);
    }
  }
  for (const auto& e : itc.events) out.events.push_back({e.kind, t0 + timewarp::eval_mu(mu, e.t - t0).value, e.detail});
  return out;
}

sim::Trajectory unwarp_trajectory(const sim::Trajectory& ptc, const timewarp::KappaMap& kappa,
                                  const dynamics::EulerLagrangeModel* model) {
  sim::Trajectory out;
  out.scenario = ptc.scenario;
  out.seed = ptc.seed;
  if (ptc.size() == 0) return out;
  const double t0 = ptc.times.front();
  for (std::size_t k = 0; k < ptc.size(); ++k) {
    const double dt = ptc.times[k] - t0;
    if (dt >= kappa.clamp_time()) break;
    const timewarp::Jet j = timewarp::eval_kappa(kappa, dt);
    out.times.push_back(t0 + j.value);
    out.q.push_back(ptc.q[k]);
    out.qd.push_back(ptc.qd[k] / j.d1);
    if (model) {
      const double k2 = j.d1 * j.d1;
      const Vec g = model->gravity(ptc.q[k]);
      out.u.push_back((ptc.u[k] - (j.d2 / j.d1) * (model->mass(ptc.q[k]) * ptc.qd[k]) - (1.0 - k2) * g) / k2);
      out.d.push_back(ptc.d[k] / k2);
    } else {
      out.u.push_back(ptc.u[k]);
      out.d.push_back(ptc.d[k]);
    }
  }
  return out;
}

Vec interpolate(const std::vector<double>& times, const std::vector<Vec>& values, double t) {
  if (times.empty()) throw DomainError("cannot interpolate an empty series");
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(std::distance(times.begin(), it));
  const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return (1.0 - w) * values[i - 1] + w * values[i];
}

namespace {

// PTC sample indices whose mapped ITC time lies inside the ITC span, with the jets.
struct MappedSample {
  std::size_t index;
  timewarp::Jet kappa;
};

std::vector<MappedSample> mapped_samples(const sim::Trajectory& ptc, const sim::Trajectory& itc,
                                         const timewarp::KappaMap& kappa) {
  std::vector<MappedSample> out;
  if (ptc.size() == 0 || itc.size() == 0) return out;
  const double t0 = ptc.times.front();
  const double span = itc.times.back() - itc.times.front();
  for (std::size_t k = 0; k < ptc.size(); ++k) {
    const double dt = ptc.times[k] - t0;
    if (dt >= kappa.clamp_time()) break;
    const timewarp::Jet j = timewarp::eval_kappa(kappa, dt);
    if (j.value > span) break;
    out.push_back({k, j});
  }
  return out;
}

}  // namespace

Mismatch equivalence_mismatch(const sim::Trajectory& ptc, const sim::Trajectory& itc,
                              const timewarp::KappaMap& kappa) {
  Mismatch m;
  const double s0 = itc.times.empty() ? 0.0 : itc.times.front();
  for (const auto& s : mapped_samples(ptc, itc, kappa)) {
    const double t_itc = s0 + s.kappa.value;
    const Vec q = interpolate(itc.times, itc.q, t_itc);
    const Vec qd = interpolate(itc.times, itc.qd, t_itc) * s.kappa.d1;
    const double ep = (ptc.q[s.index] - q).lpNorm<Eigen::Infinity>();
    const double ev = (ptc.qd[s.index] - qd).lpNorm<Eigen::Infinity>();
    if (ep > m.position) {
      m.position = ep;
      m.t_position = ptc.times[s.index];
    }
    if (ev > m.velocity) {
      m.velocity = ev;
      m.t_velocity = ptc.times[s.index];
    }
    ++m.samples;
  }
  return m;
}

Output map_output(Output w, timewarp::KappaMap kappa) {
  return [w = std::move(w), kappa = std::move(kappa)](const Vec& qd, const Vec& q, double mu) -> Vec {
    const timewarp::Jet j = timewarp::eval_kappa(kappa, mu);
    return w(qd / j.d1, q, j.value);
  };
}

Output energy_output(const dynamics::EulerLagrangeModel& model, const Mat& P, const Vec& target) {
  return [model, P, target](const Vec& qd, const Vec& q, double) -> Vec {
    const Vec e = q - target;
    Vec v(1);
    v(0) = 0.5 * qd.dot(model.mass(q) * qd) - 0.5 * e.dot(P * e);
    return v;
  };
}

OutputComparison compare_outputs(const sim::Trajectory& ptc, const sim::Trajectory& itc,
                                 const timewarp::KappaMap& kappa, const Output& w, std::size_t window) {
  OutputComparison r;
  const auto samples = mapped_samples(ptc, itc, kappa);
  if (samples.empty()) return r;
  const Output v = map_output(w, kappa);
  const double t0 = ptc.times.front();
  const double s0 = itc.times.front();
  std::vector<Vec> vs, ws;
  for (const auto& s : samples) {
    const double t_itc = s0 + s.kappa.value;
    vs.push_back(v(ptc.qd[s.index], ptc.q[s.index], ptc.times[s.index] - t0));
    ws.push_back(w(interpolate(itc.times, itc.qd, t_itc), interpolate(itc.times, itc.q, t_itc), s.kappa.value));
  }
  for (std::size_t k = 0; k < vs.size(); ++k) {
    r.max_mismatch = std::max(r.max_mismatch, (vs[k] - ws[k]).lpNorm<Eigen::Infinity>());
    r.max_abs_w = std::max(r.max_abs_w, ws[k].lpNorm<Eigen::Infinity>());
  }
  r.compared = vs.size();
  r.tolerance = 5e-3 * (1.0 + r.max_abs_w);
  r.within_tolerance = r.max_mismatch <= r.tolerance;

  const double floor = 1e-12 * (1.0 + r.max_abs_w);
  auto sign = [floor](double x) { return x > floor ? 1 : (x < -floor ? -1 : 0); };
  const Eigen::Index m = vs.front().size();
  for (Eigen::Index c = 0; c < m; ++c) {
    const std::size_t nd = vs.size() - 1;
    std::vector<int> sv(nd), sw(nd);
    for (std::size_t k = 0; k < nd; ++k) {
      sv[k] = sign(vs[k + 1](c) - vs[k](c));
      sw[k] = sign(ws[k + 1](c) - ws[k](c));
    }
    // Mark a neighbourhood around every sign change of either series.
    std::vector<bool> excluded(nd, false);
    for (const auto* s : {&sv, &sw}) {
      int last = 0;
      for (std::size_t k = 0; k < nd; ++k) {
        if ((*s)[k] == 0) continue;
        if (last != 0 && (*s)[k] != last) {
          const std::size_t lo = k > window ? k - window : 0;
          const std::size_t hi = std::min(nd, k + window + 1);
          for (std::size_t i = lo; i < hi; ++i) excluded[i] = true;
        }
        last = (*s)[k];
      }
    }
    for (std::size_t k = 0; k < nd; ++k) {
      if (excluded[k] || sv[k] == 0 || sw[k] == 0) continue;
      ++r.sign_checked;
      if (sv[k] != sw[k]) ++r.sign_violations;
    }
  }
  r.sign_preserved = r.sign_violations == 0;
  return r;
}

MembershipReport mu_membership_check(const sim::Trajectory& run, const timewarp::MuMap& mu,
                                     const dynamics::EulerLagrangeModel& model, const control::ControlLaw& itc) {
  MembershipReport r;
  if (run.size() == 0) return r;
  const auto assumption = verify::check_assumption1(run, model, itc, mu, run.times.front());
  r.t_tilde = assumption.t_tilde;
  const double t0 = run.times.front();
  bool prime = true;
  bool dprime = true;
  for (std::size_t k = 0; k < run.size(); ++k) {
    const double s = run.times[k] - t0;
    if (s < r.t_tilde) continue;
    const timewarp::Jet m = timewarp::eval_mu(mu, s);
    const double md2 = m.d1 * m.d1;
    const double f_tilde = (itc(run.qd[k], run.q[k], run.times[k]) - model.gravity(run.q[k])).norm();
    const double growth = -m.d2 / (md2 * m.d1);
    const double speed = run.qd[k].norm();
    prime = prime && f_tilde < md2;
    dprime = dprime && speed < growth;
    r.delta_prime = std::max(r.delta_prime, f_tilde / md2);
    r.delta_double_prime = std::max(r.delta_double_prime, growth * speed);
    ++r.samples;
  }
  r.in_m_prime = r.samples > 0 && prime;
  r.in_m_double_prime = r.samples > 0 && dprime;
  r.bound_delta = std::max(r.delta_prime, r.delta_double_prime);
  r.certified = r.in_m_prime && r.in_m_double_prime && r.bound_delta < 1.0;
  return r;
}

}  // namespace ptc::assess
