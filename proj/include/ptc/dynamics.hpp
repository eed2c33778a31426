#pragma once

#include <functional>
#include <random>
#include <string>

#include "ptc/types.hpp"

namespace ptc::dynamics {

/// M(q) qdd + C(qd, q) qd + g(q) = u + d
struct EulerLagrangeModel {
  int n = 0;
  std::function<Mat(const Vec& q)> mass;
  std::function<Mat(const Vec& qd, const Vec& q)> coriolis;
  std::function<Vec(const Vec& q)> gravity;
  std::string name;
};

/// Planar two-link arm in a vertical plane. Units: m, kg, kg m^2, m/s^2.
struct TwoLinkParams {
  double l1 = 1.0;
  double l2 = 1.0;
  double lc1 = 0.5;
  double lc2 = 0.5;
  double m1 = 1.0;
  double m2 = 1.0;
  double I1 = 0.33;
  double I2 = 0.33;
  double g0 = 9.81;

  bool operator==(const TwoLinkParams&) const = default;
  bool is_reference() const { return *this == TwoLinkParams{}; }
};

/// Which closed form of the two-link equations to evaluate.
///
/// Textbook: the standard derivation,
///   M11 = a + 2b cos q2, M12 = c + b cos q2, M22 = c,
///   C   = -b sin q2 [[qd2, qd1 + qd2], [-qd1, 0]].
/// AsPrinted: the variant with sin(q1+q2)-dependent off-diagonal and M22 terms
///   and a -cos(q1+q2) Coriolis factor. It shares M11 and g with Textbook but
///   does not satisfy skew-symmetry of Mdot - 2C; kept for reproducibility.
enum class TwoLinkForm { Textbook, AsPrinted };

std::string to_string(TwoLinkForm f);
TwoLinkForm two_link_form_from_string(const std::string& s);

/// Throws DomainError if any parameter is not strictly positive.
EulerLagrangeModel two_link_model(const TwoLinkParams& params = {},
                                  TwoLinkForm form = TwoLinkForm::Textbook);

/// qdd = M(q)^-1 (u + d - C(qd, q) qd - g(q)) via Cholesky.
/// SingularMass if M(q) is not positive definite.
Vec forward_dynamics(const EulerLagrangeModel& model, const Vec& q, const Vec& qd, const Vec& u,
                     const Vec& d);

/// Directional derivative of M along qd: (M(q + h qd) - M(q - h qd)) / 2h.
Mat mass_rate(const EulerLagrangeModel& model, const Vec& q, const Vec& qd, double h = 1e-6);

struct PropertySample {
  double skew_residual = 0.0;       ///< |x^T (Mdot - 2C) x|
  double linearity_residual = 0.0;  ///< ||C(a qd, q) - a C(qd, q)||
  double min_mass_eigenvalue = 0.0;
  double symmetry_residual = 0.0;   ///< ||M - M^T||
};

/// Evaluates the structural properties of one random (q, qd, x, a) draw.
PropertySample sample_properties(const EulerLagrangeModel& model, std::mt19937_64& rng);

struct PropertyReport {
  std::size_t samples = 0;
  double max_skew_residual = 0.0;
  double max_linearity_residual = 0.0;
  double min_mass_eigenvalue = 0.0;
  double max_symmetry_residual = 0.0;
  bool skew_ok(double tol = 1e-6) const { return max_skew_residual <= tol; }
  bool linear_ok(double tol = 1e-10) const { return max_linearity_residual <= tol; }
  bool positive_definite() const { return min_mass_eigenvalue > 0.0; }
};

/// Randomized check of the Euler-Lagrange structure: q uniform in [-pi, pi],
/// qd and x standard normal, scale a uniform in [-3, 3].
PropertyReport check_properties(const EulerLagrangeModel& model, std::size_t samples,
                                std::uint64_t seed);

}  // namespace ptc::dynamics
