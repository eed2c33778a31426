#include "ptc/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "ptc/errors.hpp"

namespace ptc::dynamics {

namespace {

// Lumped inertial constants of the two-link arm.
struct TwoLinkConstants {
  double inertia_11;    // m1 lc1^2 + m2 (l1^2 + lc2^2) + I1 + I2
  double coupling;      // m2 l1 lc2
  double distal_mass;   // m2 lc2^2
  double distal_inertia;  // I2
  double grav_1;        // (m1 lc1 + m2 l1) g0
  double grav_2;        // m2 lc2 g0
};

TwoLinkConstants constants_for(const TwoLinkParams& p) {
  if (p.is_reference()) {
    // Reference parameter set: keep the tabulated constants bit-exact.
    return {2.16, 0.5, 0.25, 0.33, 1.5 * 9.81, 0.5 * 9.81};
  }
  return {p.m1 * p.lc1 * p.lc1 + p.m2 * (p.l1 * p.l1 + p.lc2 * p.lc2) + p.I1 + p.I2,
          p.m2 * p.l1 * p.lc2,
          p.m2 * p.lc2 * p.lc2,
          p.I2,
          (p.m1 * p.lc1 + p.m2 * p.l1) * p.g0,
          p.m2 * p.lc2 * p.g0};
}

void validate(const TwoLinkParams& p) {
  for (double v : {p.l1, p.l2, p.lc1, p.lc2, p.m1, p.m2, p.I1, p.I2, p.g0})
    if (!(std::isfinite(v) && v > 0.0)) throw DomainError("two-link parameters must be strictly positive");
}

}  // namespace

std::string to_string(TwoLinkForm f) { return f == TwoLinkForm::Textbook ? "textbook" : "printed"; }

TwoLinkForm two_link_form_from_string(const std::string& s) {
  if (s == "textbook") return TwoLinkForm::Textbook;
  if (s == "printed") return TwoLinkForm::AsPrinted;
  throw DomainError("unknown two-link form '" + s + "' (expected textbook|printed)");
}

EulerLagrangeModel two_link_model(const TwoLinkParams& params, TwoLinkForm form) {
  validate(params);
  const TwoLinkConstants k = constants_for(params);

  EulerLagrangeModel m;
  m.n = 2;
  m.name = "two_link/" + to_string(form);
  m.gravity = [k](const Vec& q) {
    Vec g(2);
    const double c12 = std::cos(q(0) + q(1));
    g << k.grav_1 * std::cos(q(0)) + k.grav_2 * c12, k.grav_2 * c12;
    return g;
  };

  if (form == TwoLinkForm::Textbook) {
    m.mass = [k](const Vec& q) {
      const double c2 = std::cos(q(1));
      const double off = k.distal_mass + k.distal_inertia + k.coupling * c2;
      Mat M(2, 2);
      M << k.inertia_11 + 2.0 * k.coupling * c2, off, off, k.distal_mass + k.distal_inertia;
      return M;
    };
    m.coriolis = [k](const Vec& qd, const Vec& q) {
      const double h = -k.coupling * std::sin(q(1));
      Mat C(2, 2);
      C << h * qd(1), h * (qd(0) + qd(1)), -h * qd(0), 0.0;
      return C;
    };
  } else {
    m.mass = [k](const Vec& q) {
      const double s12 = std::sin(q(0) + q(1));
      const double m22 = k.distal_mass * s12 * s12 + k.distal_inertia;
      const double m12 = k.coupling * s12 * std::sin(q(0)) + m22;
      Mat M(2, 2);
      M << 2.0 * k.coupling * std::cos(q(1)) + k.inertia_11, m12, m12, m22;
      return M;
    };
    m.coriolis = [k](const Vec& qd, const Vec& q) {
      const double h = -2.0 * k.coupling * std::cos(q(0) + q(1));
      Mat C(2, 2);
      C << h * qd(1), h * (qd(0) + qd(1)), -h * qd(0), 0.0;
      return C;
    };
  }
  return m;
}

Vec forward_dynamics(const EulerLagrangeModel& model, const Vec& q, const Vec& qd, const Vec& u,
                     const Vec& d) {
  const Mat M = model.mass(q);
  const Vec rhs = u + d - model.coriolis(qd, q) * qd - model.gravity(q);
  Eigen::LLT<Mat> llt(M);
  if (llt.info() != Eigen::Success) throw SingularMass("mass matrix is not positive definite");
  return llt.solve(rhs);
}

Mat mass_rate(const EulerLagrangeModel& model, const Vec& q, const Vec& qd, double h) {
  return (model.mass(q + h * qd) - model.mass(q - h * qd)) / (2.0 * h);
}

PropertySample sample_properties(const EulerLagrangeModel& model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> scale(-3.0, 3.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = model.n;
  Vec q(n), qd(n), x(n);
  for (int i = 0; i < n; ++i) q(i) = angle(rng);
  for (int i = 0; i < n; ++i) qd(i) = normal(rng);
  for (int i = 0; i < n; ++i) x(i) = normal(rng);
  const double a = scale(rng);

  const Mat M = model.mass(q);
  const Mat C = model.coriolis(qd, q);
  PropertySample s;
  s.skew_residual = std::abs(x.dot((mass_rate(model, q, qd) - 2.0 * C) * x));
  s.linearity_residual = (model.coriolis(a * qd, q) - a * C).norm();
  s.symmetry_residual = (M - M.transpose()).norm();
  s.min_mass_eigenvalue = Eigen::SelfAdjointEigenSolver<Mat>(M).eigenvalues().minCoeff();
  return s;
}

PropertyReport check_properties(const EulerLagrangeModel& model, std::size_t samples,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PropertyReport r;
  r.samples = samples;
  r.min_mass_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const PropertySample s = sample_properties(model, rng);
    r.max_skew_residual = std::max(r.max_skew_residual, s.skew_residual);
    r.max_linearity_residual = std::max(r.max_linearity_residual, s.linearity_residual);
    r.max_symmetry_residual = std::max(r.max_symmetry_residual, s.symmetry_residual);
    r.min_mass_eigenvalue = std::min(r.min_mass_eigenvalue, s.min_mass_eigenvalue);
  }
  return r;
}

}  // namespace ptc::dynamics
