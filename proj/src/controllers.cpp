#include "ptc/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ptc/errors.hpp"

namespace ptc::control {

using dynamics::EulerLagrangeModel;
using timewarp::KappaMap;

std::string to_string(LawKind k) {
  switch (k) {
    case LawKind::Itc: return "itc";
    case LawKind::Ptc: return "ptc";
    case LawKind::PtcSwitching: return "ptc_switching";
  }
  return "unknown";
}

std::string to_string(SwitchNorm s) { return s == SwitchNorm::Error ? "error" : "state"; }

SwitchNorm switch_norm_from_string(const std::string& s) {
  if (s == "error") return SwitchNorm::Error;
  if (s == "state") return SwitchNorm::State;
  throw DomainError("unknown switch norm '" + s + "' (expected error|state)");
}

bool is_negative_definite(const Mat& A) {
  if (A.rows() == 0 || A.rows() != A.cols()) return false;
  const Mat sym = 0.5 * (A + A.transpose());
  return Eigen::SelfAdjointEigenSolver<Mat>(sym).eigenvalues().maxCoeff() < 0.0;
}

namespace {

void require_gains(const Mat& P, const Mat& D, int n) {
  if (P.rows() != n || P.cols() != n || D.rows() != n || D.cols() != n)
    throw DomainError("gain matrices must be " + std::to_string(n) + "x" + std::to_string(n));
  if (!is_negative_definite(P)) throw GainSignError("P must be negative definite");
  if (!is_negative_definite(D)) throw GainSignError("D must be negative definite");
}

void require_target(const Vec& target, int n) {
  if (target.size() != n) throw DomainError("target must have " + std::to_string(n) + " entries");
}

}  // namespace

ControlLaw::ControlLaw(Feedback itc, LawMetadata meta) : itc_(std::move(itc)), meta_(std::move(meta)) {
  if (!itc_) throw DomainError("control law needs a feedback function");
}

std::optional<double> ControlLaw::warp_elapsed(double t) const {
  const double elapsed = t - meta_.t0;
  switch (meta_.kind) {
    case LawKind::Itc:
      return std::nullopt;
    case LawKind::Ptc:
      if (elapsed >= meta_.tau) return std::nullopt;
      return elapsed;
    case LawKind::PtcSwitching:
      if (switch_time_) return *switch_time_ - meta_.t0;
      return std::min(elapsed, meta_.tau - meta_.epsilon);
  }
  return std::nullopt;
}

Vec ControlLaw::operator()(const Vec& qd, const Vec& q, double t) const {
  if (meta_.kind == LawKind::Itc) return itc_(qd, q);
  if (t < meta_.t0) throw DomainError("time-varying law evaluated before t0");
  const auto elapsed = warp_elapsed(t);
  if (!elapsed) return itc_(qd, q);
  const timewarp::Jet k = timewarp::eval_kappa(*meta_.mapping, *elapsed);
  return warp_feedback(itc_, *model_, k.d1, k.d2, qd, q);
}

bool ControlLaw::observe(const Vec& qd, const Vec& q, double t) {
  if (meta_.kind != LawKind::PtcSwitching || switch_time_) return false;
  const double deadline = meta_.t0 + meta_.tau - meta_.epsilon;
  double norm = 0.0;
  if (meta_.switch_norm == SwitchNorm::Error) {
    norm = std::sqrt((q - meta_.target).squaredNorm() + qd.squaredNorm());
  } else {
    norm = std::sqrt(q.squaredNorm() + qd.squaredNorm());
  }
  const bool inside = t <= deadline && norm >= meta_.sigma;
  if (inside) return false;
  switch_time_ = std::min(t, deadline);
  return true;
}

ControlLaw pd_gravity_itc(const EulerLagrangeModel& model, const Mat& P, const Mat& D,
                          const Vec& target, LimitAccel limit_accel) {
  require_gains(P, D, model.n);
  require_target(target, model.n);
  auto gravity = model.gravity;
  Feedback f = [P, D, target, gravity, limit_accel](const Vec& qd, const Vec& q) -> Vec {
    Vec u = P * (q - target) + D * qd + gravity(q);
    if (limit_accel) u += limit_accel(q);
    return u;
  };
  LawMetadata meta;
  meta.kind = LawKind::Itc;
  meta.itc_name = limit_accel ? "pd_gravity_limits" : "pd_gravity";
  meta.target = target;
  meta.P = P;
  meta.D = D;
  return ControlLaw(std::move(f), std::move(meta));
}

ControlLaw feedback_linearization_itc(const EulerLagrangeModel& model, const Mat& P, const Mat& D,
                                      const Vec& target) {
  require_gains(P, D, model.n);
  require_target(target, model.n);
  Feedback f = [P, D, target, model](const Vec& qd, const Vec& q) -> Vec {
    return model.coriolis(qd, q) * qd + model.gravity(q) + model.mass(q) * (P * (q - target) + D * qd);
  };
  LawMetadata meta;
  meta.kind = LawKind::Itc;
  meta.itc_name = "feedback_linearization";
  meta.target = target;
  meta.P = P;
  meta.D = D;
  return ControlLaw(std::move(f), std::move(meta));
}

double joint_limit_accel(double q, double lower, double upper, double influence, double gain) {
  if (!(lower < upper)) throw DomainError("joint limit requires lower < upper");
  if (!(influence > 0.0)) throw DomainError("joint limit influence must be positive");
  constexpr double kMinDistanceDeg = 1e-6;
  const double q_deg = q * kRadToDeg;
  const double lo_deg = lower * kRadToDeg;
  const double hi_deg = upper * kRadToDeg;
  const double band = influence * kRadToDeg;

  double accel = 0.0;
  if (q_deg < lo_deg + band) {
    const double d = std::max(q_deg - lo_deg, kMinDistanceDeg);
    accel += (1.0 / d - 1.0 / band) * gain / (d * d);
  }
  if (q_deg > hi_deg - band) {
    const double d = std::max(hi_deg - q_deg, kMinDistanceDeg);
    accel += (1.0 / d - 1.0 / band) * (-gain) / (d * d);
  }
  return accel;
}

LimitAccel joint_limit_field(std::vector<JointLimit> limits, int n) {
  for (const auto& l : limits)
    if (l.joint < 0 || l.joint >= n) throw DomainError("joint limit index out of range");
  return [limits = std::move(limits), n](const Vec& q) {
    Vec gamma = Vec::Zero(n);
    for (const auto& l : limits)
      gamma(l.joint) += joint_limit_accel(q(l.joint), l.lower, l.upper, l.influence, l.gain);
    return gamma;
  };
}

Vec warp_feedback(const Feedback& itc, const EulerLagrangeModel& model, double kd, double kdd,
                  const Vec& qd, const Vec& q) {
  const double kd2 = kd * kd;
  Vec u = kd2 * itc(qd / kd, q);
  u.noalias() += (kdd / kd) * (model.mass(q) * qd);
  u += (1.0 - kd2) * model.gravity(q);
  return u;
}

namespace {

LawMetadata warped_metadata(const ControlLaw& itc, const KappaMap& kappa, double t0, LawKind kind) {
  if (itc.kind() != LawKind::Itc) throw DomainError("time-warp synthesis expects an ITC");
  LawMetadata meta = itc.metadata();
  meta.kind = kind;
  meta.mapping = kappa;
  meta.t0 = t0;
  meta.tau = kappa.tau();
  const auto report = timewarp::validate_class(kappa, timewarp::ClassTarget::K1);
  if (!report.passed()) {
    if (!timewarp::validate_class(kappa, timewarp::ClassTarget::K).passed())
      throw DomainError("mapping is not a class-K time warp");
    const double slope = timewarp::eval_kappa(kappa, 0.0).d1;
    meta.warnings.push_back("mapping is class K but not K1 (kappa'(0) = " + std::to_string(slope) +
                            "); initial velocities map as qd_ptc(t0) = kappa'(0) qd_itc(t0)");
  }
  return meta;
}

}  // namespace

ControlLaw ptc_synthesize(const ControlLaw& itc, const EulerLagrangeModel& model,
                          const KappaMap& kappa, double t0) {
  ControlLaw law(itc.itc(), warped_metadata(itc, kappa, t0, LawKind::Ptc));
  law.model_ = model;
  return law;
}

ControlLaw ptc_switching(const ControlLaw& itc, const EulerLagrangeModel& model,
                         const KappaMap& kappa, double t0, double epsilon, double sigma,
                         SwitchNorm norm) {
  if (!(epsilon > 0.0 && epsilon < kappa.tau())) throw DomainError("switching requires 0 < epsilon < tau");
  if (!(sigma >= 0.0)) throw DomainError("switching threshold sigma must be >= 0");
  LawMetadata meta = warped_metadata(itc, kappa, t0, LawKind::PtcSwitching);
  meta.epsilon = epsilon;
  meta.sigma = sigma;
  meta.switch_norm = norm;
  ControlLaw law(itc.itc(), std::move(meta));
  law.model_ = model;
  return law;
}

GainSchedule pd_gravity_schedule(const Mat& P, const Mat& D, const EulerLagrangeModel& model,
                                 const KappaMap& kappa, double t0, double t, const Vec& q) {
  if (t - t0 >= kappa.tau()) return {P, D};
  const timewarp::Jet k = timewarp::eval_kappa(kappa, t - t0);
  return {k.d1 * k.d1 * P, k.d1 * D + (k.d2 / k.d1) * model.mass(q)};
}

GainSchedule feedback_linearization_schedule(const Mat& P, const Mat& D, const KappaMap& kappa,
                                             double t0, double t) {
  if (t - t0 >= kappa.tau()) return {P, D};
  const timewarp::Jet k = timewarp::eval_kappa(kappa, t - t0);
  return {k.d1 * k.d1 * P, k.d1 * D + (k.d2 / k.d1) * Mat::Identity(P.rows(), P.cols())};
}

Vec scheduled_pd_gravity(const GainSchedule& gains, const EulerLagrangeModel& model,
                         const Vec& target, const Vec& qd, const Vec& q) {
  return gains.P * (q - target) + gains.D * qd + model.gravity(q);
}

Vec scheduled_feedback_linearization(const GainSchedule& gains, const EulerLagrangeModel& model,
                                     const Vec& target, const Vec& qd, const Vec& q) {
  return model.coriolis(qd, q) * qd + model.gravity(q) +
         model.mass(q) * (gains.P * (q - target) + gains.D * qd);
}

}  // namespace ptc::control
