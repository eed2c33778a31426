#pragma once

// Infinite-time controllers (ITC) for Euler-Lagrange systems and their
// prescribed-time counterparts (PTC) obtained by warping time.
//
// Given an ITC f(qd, q) and a time-warp kappa, the PTC is
//
//   h(qd, q, t) = kd^2 f(qd / kd, q) + (kdd / kd) M(q) qd + (1 - kd^2) g(q)
//
// with kd = kappa'(t - t0), kdd = kappa''(t - t0), for t in [t0, t0 + tau), and
// h = f afterwards. The closed loop under h retraces the ITC path, compressed
// into [t0, t0 + tau).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ptc/dynamics.hpp"
#include "ptc/timewarp.hpp"
#include "ptc/types.hpp"

namespace ptc::control {

enum class LawKind { Itc, Ptc, PtcSwitching };

/// Norm used by the switching set: ||[q - q_d; qd]|| (Error) or ||[q; qd]|| (State).
enum class SwitchNorm { Error, State };

std::string to_string(LawKind k);
std::string to_string(SwitchNorm s);
SwitchNorm switch_norm_from_string(const std::string& s);

using Feedback = std::function<Vec(const Vec& qd, const Vec& q)>;
using LimitAccel = std::function<Vec(const Vec& q)>;

struct LawMetadata {
  LawKind kind = LawKind::Itc;
  std::string itc_name;
  Vec target;
  Mat P;
  Mat D;
  std::optional<timewarp::KappaMap> mapping;
  double t0 = 0.0;
  double tau = 0.0;
  double epsilon = 0.0;
  double sigma = 0.0;
  SwitchNorm switch_norm = SwitchNorm::Error;
  std::vector<std::string> warnings;
};

class ControlLaw {
 public:
  ControlLaw(Feedback itc, LawMetadata meta);

  /// u = h(qd, q, t). DomainError for t < t0 on time-varying kinds; NonFinite
  /// from the time-warp when a plain PTC is queried too close to t0 + tau.
  Vec operator()(const Vec& qd, const Vec& q, double t) const;

  LawKind kind() const { return meta_.kind; }
  const LawMetadata& metadata() const { return meta_; }
  const Feedback& itc() const { return itc_; }

  /// Step-boundary hook for the switching law: latches the switch time on the
  /// first exit from the switching set. Returns true only on the latching call.
  bool observe(const Vec& qd, const Vec& q, double t);

  std::optional<double> switch_time() const { return switch_time_; }
  void reset() { switch_time_.reset(); }

  /// Elapsed time fed to kappa at absolute time t (frozen after a switch);
  /// nullopt once a plain PTC has handed over to the ITC.
  std::optional<double> warp_elapsed(double t) const;

 private:
  friend ControlLaw ptc_synthesize(const ControlLaw&, const dynamics::EulerLagrangeModel&,
                                   const timewarp::KappaMap&, double);
  friend ControlLaw ptc_switching(const ControlLaw&, const dynamics::EulerLagrangeModel&,
                                  const timewarp::KappaMap&, double, double, double, SwitchNorm);

  Feedback itc_;
  std::optional<dynamics::EulerLagrangeModel> model_;
  LawMetadata meta_;
  std::optional<double> switch_time_;
};

/// Symmetric part strictly negative definite.
bool is_negative_definite(const Mat& A);

/// f = P (q - q_d) + D qd + g(q) + gamma(q). GainSignError unless P, D < 0.
ControlLaw pd_gravity_itc(const dynamics::EulerLagrangeModel& model, const Mat& P, const Mat& D,
                          const Vec& target, LimitAccel limit_accel = {});

/// f = C(qd, q) qd + g(q) + M(q) (P (q - q_d) + D qd). GainSignError unless P, D < 0.
ControlLaw feedback_linearization_itc(const dynamics::EulerLagrangeModel& model, const Mat& P,
                                      const Mat& D, const Vec& target);

/// Repulsive joint-limit term of a potential field. All angles in radians;
/// the field itself is evaluated in degrees:
///   lower band  (d = q - lower < influence):  (1/d - 1/influence) * gain / d^2
///   upper band  (d = upper - q < influence): -(1/d - 1/influence) * gain / d^2
/// and zero in between. d is clamped below at 1e-6 degree so positions past a
/// bound still produce a finite push back.
double joint_limit_accel(double q, double lower = -3.0 * kDegToRad, double upper = 3.0 * kDegToRad,
                         double influence = 0.5 * kDegToRad, double gain = 1e-9);

struct JointLimit {
  int joint = 1;  ///< zero-based joint index
  double lower = -3.0 * kDegToRad;
  double upper = 3.0 * kDegToRad;
  double influence = 0.5 * kDegToRad;
  double gain = 1e-9;
  bool operator==(const JointLimit&) const = default;
};

/// gamma(q) with one joint_limit_accel entry per configured joint.
LimitAccel joint_limit_field(std::vector<JointLimit> limits, int n);

/// Warped feedback h at given kappa derivatives (kd, kdd).
Vec warp_feedback(const Feedback& itc, const dynamics::EulerLagrangeModel& model, double kd,
                  double kdd, const Vec& qd, const Vec& q);

/// Plain PTC. Warns (metadata.warnings) when kappa is only class K.
ControlLaw ptc_synthesize(const ControlLaw& itc, const dynamics::EulerLagrangeModel& model,
                          const timewarp::KappaMap& kappa, double t0);

/// Bounded-gain PTC: the live schedule runs while t <= t0 + tau - epsilon and
/// the switching norm is >= sigma; on first exit the elapsed time is frozen.
ControlLaw ptc_switching(const ControlLaw& itc, const dynamics::EulerLagrangeModel& model,
                         const timewarp::KappaMap& kappa, double t0, double epsilon, double sigma,
                         SwitchNorm norm = SwitchNorm::Error);

struct GainSchedule {
  Mat P;
  Mat D;
};

/// P~ = kd^2 P, D~ = kd D + (kdd / kd) M(q); (P, D) once t >= t0 + tau.
GainSchedule pd_gravity_schedule(const Mat& P, const Mat& D, const dynamics::EulerLagrangeModel& model,
                                 const timewarp::KappaMap& kappa, double t0, double t, const Vec& q);

/// P~ = kd^2 P, D~ = kd D + (kdd / kd) I; (P, D) once t >= t0 + tau.
GainSchedule feedback_linearization_schedule(const Mat& P, const Mat& D,
                                             const timewarp::KappaMap& kappa, double t0, double t);

/// u = P~ (q - q_d) + D~ qd + g(q)
Vec scheduled_pd_gravity(const GainSchedule& gains, const dynamics::EulerLagrangeModel& model,
                         const Vec& target, const Vec& qd, const Vec& q);

/// u = C(qd, q) qd + g(q) + M(q) (P~ (q - q_d) + D~ qd)
Vec scheduled_feedback_linearization(const GainSchedule& gains,
                                     const dynamics::EulerLagrangeModel& model, const Vec& target,
                                     const Vec& qd, const Vec& q);

}  // namespace ptc::control
