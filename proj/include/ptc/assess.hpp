#pragma once

// Moving trajectories and outputs between the infinite-time (ITC) and the
// prescribed-time (PTC) domains. All maps take t0 = times.front().

#include <functional>
#include <vector>

#include "ptc/controllers.hpp"
#include "ptc/dynamics.hpp"
#include "ptc/sim.hpp"
#include "ptc/timewarp.hpp"
#include "ptc/types.hpp"

namespace ptc::assess {

/// Predicted PTC trajectory from an ITC run: sample times t0 + mu(s), same q,
/// qd / mu'(s). With a model, u becomes the PTC torque
///   f / mu'^2 - (mu'' / mu'^3) M qd + (1 - 1 / mu'^2) g
/// and d the equivalent PTC-domain disturbance d / mu'^2; without one they are
/// copied unchanged.
sim::Trajectory warp_trajectory(const sim::Trajectory& itc, const timewarp::MuMap& mu,
                                const dynamics::EulerLagrangeModel* model = nullptr);

/// Inverse of warp_trajectory: times t0 + kappa(t - t0), qd / kappa'. Samples
/// at or past the kappa clamp time are dropped.
sim::Trajectory unwarp_trajectory(const sim::Trajectory& ptc, const timewarp::KappaMap& kappa,
                                  const dynamics::EulerLagrangeModel* model = nullptr);

/// Linear interpolation of a sampled series at t (clamped to the ends).
Vec interpolate(const std::vector<double>& times, const std::vector<Vec>& values, double t);

struct Mismatch {
  double position = 0.0;  ///< sup-norm over the common grid, rad
  double velocity = 0.0;  ///< rad/s
  double t_position = 0.0;
  double t_velocity = 0.0;
  std::size_t samples = 0;
};

/// Compares a PTC run against an ITC run mapped onto the PTC grid: for every
/// PTC sample with kappa(t - t0) inside the ITC span, q_ptc(t) vs q_itc(kappa)
/// and qd_ptc(t) vs kappa' qd_itc(kappa).
Mismatch equivalence_mismatch(const sim::Trajectory& ptc, const sim::Trajectory& itc,
                              const timewarp::KappaMap& kappa);

/// Output (qd, q, t) -> R^m.
using Output = std::function<Vec(const Vec& qd, const Vec& q, double t)>;

/// V(qd, q, mu) = W(qd / kappa'(mu), q, kappa(mu)). NonFinite near mu = tau.
Output map_output(Output w, timewarp::KappaMap kappa);

/// 1/2 qd' M(q) qd + 1/2 (q - q_d)' (-P) (q - q_d).
Output energy_output(const dynamics::EulerLagrangeModel& model, const Mat& P, const Vec& target);

struct OutputComparison {
  double max_mismatch = 0.0;
  double max_abs_w = 0.0;
  double tolerance = 0.0;  ///< 5e-3 (1 + max |W|)
  bool within_tolerance = false;
  std::size_t compared = 0;
  std::size_t sign_checked = 0;
  std::size_t sign_violations = 0;
  bool sign_preserved = false;
};

/// Evaluates V along the PTC run and W along the ITC run at kappa(t - t0), per
/// component. Difference signs are compared sample to sample, skipping
/// `window` samples either side of a sign change of either series and
/// differences below 1e-12 (1 + max |W|).
OutputComparison compare_outputs(const sim::Trajectory& ptc, const sim::Trajectory& itc,
                                 const timewarp::KappaMap& kappa, const Output& w, std::size_t window = 10);

struct MembershipReport {
  bool in_m_prime = false;         ///< ||f - g|| < mu'^2 after t_tilde
  bool in_m_double_prime = false;  ///< ||qd|| < -mu'' / mu'^3 after t_tilde
  double delta_prime = 0.0;        ///< max ||f - g|| / mu'^2
  double delta_double_prime = 0.0; ///< max (-mu'' / mu'^3) ||qd||
  double bound_delta = 0.0;        ///< max of the two
  double t_tilde = 0.0;
  std::size_t samples = 0;
  bool certified = false;          ///< both flags and bound_delta < 1
};

/// Normalized-control bound along a nominal ITC run, from t_tilde on (t_tilde
/// as found by the assumption check on the same run).
MembershipReport mu_membership_check(const sim::Trajectory& itc_run, const timewarp::MuMap& mu,
                                     const dynamics::EulerLagrangeModel& model, const control::ControlLaw& itc);

}  // namespace ptc::assess
