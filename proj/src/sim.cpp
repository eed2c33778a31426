#include "ptc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>

#include "ptc/errors.hpp"

namespace ptc::sim {

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::GainSwitch: return "GainSwitch";
    case EventKind::Diverged: return "Diverged";
    case EventKind::NonFinite: return "NonFinite";
  }
  return "Unknown";
}

bool Trajectory::diverged() const {
  return std::any_of(events.begin(), events.end(), [](const Event& e) {
    return e.kind == EventKind::Diverged || e.kind == EventKind::NonFinite;
  });
}

std::optional<double> Trajectory::switch_time() const {
  for (const auto& e : events)
    if (e.kind == EventKind::GainSwitch) return e.t;
  return std::nullopt;
}

std::size_t Trajectory::index_at(double t) const {
  if (times.empty()) return 0;
  const auto it = std::upper_bound(times.begin(), times.end(), t + 1e-12 * std::max(1.0, std::abs(t)));
  if (it == times.begin()) return 0;
  return static_cast<std::size_t>(std::distance(times.begin(), it) - 1);
}

// ---------------------------------------------------------------------------
// Philox4x32-10

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline Philox4x32::Counter philox_round(const Philox4x32::Counter& c, const Philox4x32::Key& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kPhiloxM0, c[0], hi0, lo0);
  mulhilo(kPhiloxM1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

// 53-bit uniform in (0, 1].
inline double to_unit_open_closed(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    ctr = philox_round(ctr, key);
  }
  return ctr;
}

double philox_normal(std::uint64_t seed, std::uint32_t stream, std::uint64_t index) {
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                                stream, 0x57494e52u};
  const auto r = Philox4x32::generate(ctr, key);
  const double u1 = to_unit_open_closed(r[0], r[1]);
  const double u2 = to_unit_open_closed(r[2], r[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// ---------------------------------------------------------------------------
// Disturbances

std::string to_string(WienerScaling s) {
  return s == WienerScaling::PerSqrtSecond ? "per_sqrt_second" : "per_sample";
}

WienerScaling wiener_scaling_from_string(const std::string& s) {
  if (s == "per_sqrt_second") return WienerScaling::PerSqrtSecond;
  if (s == "per_sample") return WienerScaling::PerSample;
  throw DomainError("unknown wiener scaling '" + s + "' (expected per_sqrt_second|per_sample)");
}

namespace {

double increment_scale(double std, double step, WienerScaling scaling) {
  return scaling == WienerScaling::PerSqrtSecond ? std * std::sqrt(step) : std;
}

// Streams samples d_0, d_1, ... on the integration grid.
class DisturbanceStream {
 public:
  DisturbanceStream(const DisturbanceModel& model, int n, double t0, double step)
      : model_(model), current_(Vec::Zero(n)), t0_(t0), step_(step) {
    if (const auto* w = std::get_if<WienerDisturbance>(&model_)) {
      if (!(w->std >= 0.0)) throw DomainError("wiener std must be >= 0");
      scale_ = increment_scale(w->std, step, w->scaling);
    }
    if (const auto* r = std::get_if<ReplayDisturbance>(&model_)) {
      if (r->times.size() != r->values.size()) throw DomainError("replay times/values size mismatch");
      for (const auto& v : r->values)
        if (v.size() != n) throw DomainError("replay sample dimension mismatch");
    }
  }

  const Vec& at(std::size_t k) {
    if (const auto* w = std::get_if<WienerDisturbance>(&model_)) {
      while (index_ < k) {
        for (Eigen::Index i = 0; i < current_.size(); ++i)
          current_(i) += scale_ * philox_normal(w->seed, static_cast<std::uint32_t>(i), index_);
        ++index_;
      }
    } else if (const auto* r = std::get_if<ReplayDisturbance>(&model_)) {
      const double t = t0_ + static_cast<double>(k) * step_;
      const auto it = std::upper_bound(r->times.begin(), r->times.end(), t + 1e-12);
      if (it == r->times.begin()) {
        current_.setZero();
      } else {
        current_ = r->values[static_cast<std::size_t>(std::distance(r->times.begin(), it) - 1)];
      }
    }
    return current_;
  }

 private:
  const DisturbanceModel& model_;
  Vec current_;
  double t0_;
  double step_;
  double scale_ = 0.0;
  std::uint64_t index_ = 0;
};

}  // namespace

std::vector<Vec> wiener_path(double std, std::uint64_t seed, double step, std::size_t steps, int n,
                             WienerScaling scaling) {
  if (!(step > 0.0)) throw DomainError("wiener step must be positive");
  const DisturbanceModel model = WienerDisturbance{std, seed, scaling};
  DisturbanceStream stream(model, n, 0.0, step);
  std::vector<Vec> path;
  path.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) path.push_back(stream.at(k));
  return path;
}

// ---------------------------------------------------------------------------
// Integration

std::string to_string(ControlSampling s) {
  return s == ControlSampling::PerStage ? "per_stage" : "zoh";
}

ControlSampling control_sampling_from_string(const std::string& s) {
  if (s == "per_stage") return ControlSampling::PerStage;
  if (s == "zoh") return ControlSampling::ZeroOrderHold;
  throw DomainError("unknown control sampling '" + s + "' (expected per_stage|zoh)");
}

namespace {
struct State {
  Vec q;
  Vec qd;
};
}  // namespace

Trajectory integrate(const dynamics::EulerLagrangeModel& model, control::ControlLaw& law,
                     const Vec& q0, const Vec& qd0, const DisturbanceModel& disturbance,
                     const IntegrationOptions& opt) {
  const int n = model.n;
  if (q0.size() != n || qd0.size() != n) throw DomainError("initial state dimension mismatch");
  if (!(opt.step > 0.0)) throw DomainError("integration step must be positive");
  if (!(opt.horizon >= 0.0)) throw DomainError("integration horizon must be >= 0");
  if (opt.max_refine < 0 || opt.max_refine > 40) throw DomainError("max_refine must be in [0, 40]");
  const auto steps = static_cast<std::size_t>(std::llround(opt.horizon / opt.step));
  const double t_end = opt.t0 + static_cast<double>(steps) * opt.step;
  if (law.kind() == control::LawKind::Ptc) {
    const auto& m = law.metadata();
    if (t_end > m.t0 + m.tau)
      throw DomainError("plain prescribed-time law cannot be integrated past t0 + tau; use the switching law");
  }

  Trajectory traj;
  traj.scenario = opt.scenario;
  if (const auto* w = std::get_if<WienerDisturbance>(&disturbance)) traj.seed = w->seed;
  traj.times.reserve(steps + 1);
  traj.q.reserve(steps + 1);
  traj.qd.reserve(steps + 1);
  traj.u.reserve(steps + 1);
  traj.d.reserve(steps + 1);

  DisturbanceStream dist(disturbance, n, opt.t0, opt.step);
  Vec q = q0;
  Vec qd = qd0;
  const double h = opt.step;

  for (std::size_t k = 0;; ++k) {
    const double t = opt.t0 + static_cast<double>(k) * h;
    if (law.observe(qd, q, t)) traj.events.push_back({EventKind::GainSwitch, *law.switch_time(), {}});

    Vec u;
    try {
      u = law(qd, q, t);
    } catch (const NonFinite& e) {
      traj.events.push_back({EventKind::NonFinite, traj.times.empty() ? t : traj.times.back(), e.what()});
      break;
    }
    if (!u.allFinite()) {
      traj.events.push_back({EventKind::NonFinite, traj.times.empty() ? t : traj.times.back(),
                             "control is not finite"});
      break;
    }
    const Vec d = dist.at(k);
    traj.times.push_back(t);
    traj.q.push_back(q);
    traj.qd.push_back(qd);
    traj.u.push_back(u);
    traj.d.push_back(d);
    if (k == steps) break;

    auto accel = [&](const Vec& qs, const Vec& qds, double ts) -> Vec {
      if (opt.sampling == ControlSampling::ZeroOrderHold) return dynamics::forward_dynamics(model, qs, qds, u, d);
      return dynamics::forward_dynamics(model, qs, qds, law(qds, qs, ts), d);
    };
    auto rk4 = [&](State& x, double ts, double hs) {
      const Vec a1 = accel(x.q, x.qd, ts);
      const Vec q2 = x.q + 0.5 * hs * x.qd;
      const Vec v2 = x.qd + 0.5 * hs * a1;
      const Vec a2 = accel(q2, v2, ts + 0.5 * hs);
      const Vec q3 = x.q + 0.5 * hs * v2;
      const Vec v3 = x.qd + 0.5 * hs * a2;
      const Vec a3 = accel(q3, v3, ts + 0.5 * hs);
      const Vec q4 = x.q + hs * v3;
      const Vec v4 = x.qd + hs * a3;
      const Vec a4 = accel(q4, v4, ts + hs);
      x.q += (hs / 6.0) * (x.qd + 2.0 * v2 + 2.0 * v3 + v4);
      x.qd += (hs / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    };
    // Step doubling: accept the two half steps when they agree with the full step.
    std::function<void(State&, double, double, int)> advance = [&](State& x, double ts, double hs, int depth) {
      if (depth >= opt.max_refine) {
        rk4(x, ts, hs);
        return;
      }
      State full = x;
      rk4(full, ts, hs);
      State half = x;
      rk4(half, ts, 0.5 * hs);
      rk4(half, ts + 0.5 * hs, 0.5 * hs);
      double err = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        err = std::max(err, std::abs(full.q(i) - half.q(i)) / (opt.refine_atol + opt.refine_rtol * std::abs(half.q(i))));
        err = std::max(err, std::abs(full.qd(i) - half.qd(i)) / (opt.refine_atol + opt.refine_rtol * std::abs(half.qd(i))));
      }
      if (err <= 1.0) {
        x = std::move(half);
        return;
      }
      advance(x, ts, 0.5 * hs, depth + 1);
      advance(x, ts + 0.5 * hs, 0.5 * hs, depth + 1);
    };

    try {
      State x{q, qd};
      advance(x, t, h, 0);
      q = std::move(x.q);
      qd = std::move(x.qd);
    } catch (const NonFinite& e) {
      traj.events.push_back({EventKind::NonFinite, t, e.what()});
      break;
    }

    const double norm = std::sqrt(q.squaredNorm() + qd.squaredNorm());
    if (!std::isfinite(norm) || norm > opt.divergence_norm) {
      traj.events.push_back({EventKind::Diverged, t, "state norm exceeded " + std::to_string(opt.divergence_norm)});
      break;
    }
  }
  return traj;
}

void write_csv(const Trajectory& traj, std::ostream& out, const std::string& domain) {
  const int n = traj.dof();
  out << "t";
  for (const char* prefix : {"q", "qd", "u", "d"})
    for (int i = 1; i <= n; ++i) out << ',' << prefix << i;
  if (!domain.empty()) out << ",domain";
  out << '\n';

  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (std::size_t k = 0; k < traj.size(); ++k) {
    put(traj.times[k]);
    for (const auto* series : {&traj.q, &traj.qd, &traj.u, &traj.d}) {
      for (int i = 0; i < n; ++i) {
        out << ',';
        put((*series)[k](i));
      }
    }
    if (!domain.empty()) out << ',' << domain;
    out << '\n';
  }
  for (const auto& e : traj.events) {
    out << "# event," << to_string(e.kind) << ',';
    put(e.t);
    if (!e.detail.empty()) out << ',' << e.detail;
    out << '\n';
  }
}

}  // namespace ptc::sim
