#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ptc/controllers.hpp"
#include "ptc/dynamics.hpp"
#include "ptc/types.hpp"

namespace ptc::sim {

enum class EventKind { GainSwitch, Diverged, NonFinite };

std::string to_string(EventKind k);

struct Event {
  EventKind kind;
  double t;
  std::string detail;
};

/// Sampled closed-loop solution on a uniform grid.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> q;
  std::vector<Vec> qd;
  std::vector<Vec> u;
  std::vector<Vec> d;
  std::vector<Event> events;
  std::string scenario;
  std::uint64_t seed = 0;

  std::size_t size() const { return times.size(); }
  int dof() const { return q.empty() ? 0 : static_cast<int>(q.front().size()); }
  bool diverged() const;
  std::optional<double> switch_time() const;
  /// Index of the last sample with times[i] <= t (clamped to the grid).
  std::size_t index_at(double t) const;
};

/// Philox4x32-10 counter-based generator (Salmon et al., Random123). Output is a
/// pure function of (key, counter), so streams are reproducible bit-for-bit on
/// any platform and can be split by counter without shared state.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key);
};

/// Standard normal draw number `index` of stream (seed, stream) via Box-Muller
/// on Philox output.
double philox_normal(std::uint64_t seed, std::uint32_t stream, std::uint64_t index);

enum class WienerScaling {
  PerSqrtSecond,  ///< increments ~ N(0, std^2 step)
  PerSample,      ///< increments ~ N(0, std^2)
};

std::string to_string(WienerScaling s);
WienerScaling wiener_scaling_from_string(const std::string& s);

struct NoDisturbance {};

struct WienerDisturbance {
  double std = 0.1;
  std::uint64_t seed = 0;
  WienerScaling scaling = WienerScaling::PerSqrtSecond;
};

/// Replayed disturbance samples, held piecewise constant on the sample grid.
struct ReplayDisturbance {
  std::vector<double> times;
  std::vector<Vec> values;
};

using DisturbanceModel = std::variant<NoDisturbance, WienerDisturbance, ReplayDisturbance>;

/// d(t_0) = 0; d(t_{k+1}) = d(t_k) + w_k, componentwise independent.
/// Returns `steps + 1` samples.
std::vector<Vec> wiener_path(double std, std::uint64_t seed, double step, std::size_t steps, int n,
                             WienerScaling scaling = WienerScaling::PerSqrtSecond);

enum class ControlSampling {
  PerStage,       ///< law evaluated at every Runge-Kutta stage
  ZeroOrderHold,  ///< law sampled at the step start and held
};

std::string to_string(ControlSampling s);
ControlSampling control_sampling_from_string(const std::string& s);

struct IntegrationOptions {
  double t0 = 0.0;
  double horizon = 10.0;  ///< duration, seconds
  double step = 1e-3;
  ControlSampling sampling = ControlSampling::PerStage;
  double divergence_norm = 1e6;
  /// Step-doubling refinement inside each grid step: 0 keeps plain fixed-step
  /// RK4; otherwise a step is bisected (up to this depth) until the full-step
  /// and two-half-step results agree to refine_atol + refine_rtol * |x|.
  int max_refine = 0;
  double refine_atol = 1e-9;
  double refine_rtol = 1e-7;
  std::string scenario;
};

/// Fixed-step RK4 on M qdd + C qd + g = u + d. The disturbance is held constant
/// over each step. Samples always land on the uniform grid t0 + k step, also
/// when max_refine > 0 subdivides a step internally. Switching laws are polled at step boundaries and the switch
/// is recorded as an event. On divergence or a non-finite control the run stops
/// and the partial trajectory carries a Diverged / NonFinite event.
/// DomainError if a plain PTC law would be run past t0 + tau.
Trajectory integrate(const dynamics::EulerLagrangeModel& model, control::ControlLaw& law,
                     const Vec& q0, const Vec& qd0, const DisturbanceModel& disturbance,
                     const IntegrationOptions& options);

/// Writes `t,q1..qn,qd1..qdn,u1..un,d1..dn[,domain]` with 17 significant
/// digits, followed by `# event,<kind>,<t>[,detail]` trailer lines.
void write_csv(const Trajectory& traj, std::ostream& out, const std::string& domain = {});

}  // namespace ptc::sim
