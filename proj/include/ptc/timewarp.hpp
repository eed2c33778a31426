#pragma once

// Time-scaling functions that squeeze [0, inf) onto a finite horizon [0, tau).
//
// A KappaMap is a strictly increasing function kappa: [0, tau) -> [0, inf) with
// kappa(0) = 0 that diverges at tau. Its inverse mu = kappa^-1 maps [0, inf)
// onto [0, tau). Every prescribed-time controller in the toolkit is driven by
// kappa and its first two derivatives.

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ptc::timewarp {

/// kappa(t) = sum a_i t^b_i / (tau - t)^c_i
struct RationalSum {
  struct Term {
    double a;
    double b;
    double c;
    bool operator==(const Term&) const = default;
  };
  std::vector<Term> terms;
  bool operator==(const RationalSum&) const = default;
};

/// kappa(t) = -sum a_i ln(1 - t/tau)
struct LogSum {
  std::vector<double> a;
  bool operator==(const LogSum&) const = default;
};

/// kappa(t) = sum a_i tan^b_i(pi/2 * t/tau)
struct TanSum {
  struct Term {
    double a;
    double b;
    bool operator==(const Term&) const = default;
  };
  std::vector<Term> terms;
  bool operator==(const TanSum&) const = default;
};

/// Inverse of mu(s) = tau (1 - exp(-alpha s / x_norm)), i.e.
/// kappa(t) = -(x_norm / alpha) ln(1 - t/tau). Built from a Lyapunov solution.
struct ExpInverse {
  double alpha;
  double x_norm;
  bool operator==(const ExpInverse&) const = default;
};

enum class Family { RationalSum, LogSum, TanSum, ExpInverse };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

/// kappa value with its first and second derivatives.
struct Jet {
  double value;
  double d1;
  double d2;
};

class KappaMap {
 public:
  using Shape = std::variant<RationalSum, LogSum, TanSum, ExpInverse>;

  /// Throws DomainError if tau <= 0 or any coefficient is not strictly positive
  /// (ExpInverse additionally requires 0 < alpha < 0.5).
  KappaMap(Shape shape, double tau);

  static KappaMap rational(double a, double b, double c, double tau);

  Family family() const;
  const Shape& shape() const { return shape_; }
  double tau() const { return tau_; }

  /// Latest admissible evaluation time, tau (1 - 1e-12).
  double clamp_time() const;

  bool operator==(const KappaMap&) const = default;

 private:
  Shape shape_;
  double tau_;
};

/// kappa(t), kappa'(t), kappa''(t) by analytic differentiation.
/// DomainError if t < 0 or t >= tau; NonFinite if t lies past the clamp time or
/// the result overflows.
Jet eval_kappa(const KappaMap& map, double t);

/// Same as eval_kappa without the clamp; may return non-finite values. Used by
/// the root finder and validation grids that probe right up to tau.
Jet eval_kappa_unclamped(const KappaMap& map, double t);

/// mu = kappa^-1, a class-M function [0, inf) -> [0, tau).
class MuMap {
 public:
  explicit MuMap(KappaMap source) : source_(std::move(source)) {}

  const KappaMap& kappa() const { return source_; }
  double tau() const { return source_.tau(); }

  /// True when mu has an analytic expression (single rational term with
  /// b = c = 1, any LogSum, ExpInverse).
  bool has_closed_form() const;

 private:
  KappaMap source_;
};

/// mu(s), mu'(s), mu''(s). Derivatives follow from kappa at mu(s):
/// mu' = 1/kappa'(mu), mu'' = -kappa''(mu) / kappa'(mu)^3.
/// ConvergenceError if the bracketed inversion exceeds its iteration cap.
Jet eval_mu(const MuMap& mu, double s);

enum class ClassTarget { K, K1 };

struct Condition {
  std::string name;
  bool passed = true;
  std::vector<double> failing_t;
};

struct ValidationReport {
  ClassTarget target = ClassTarget::K;
  std::vector<Condition> conditions;

  bool passed() const;
  const Condition* find(const std::string& name) const;
};

struct ValidationGrid {
  std::size_t uniform_points = 10000;
  /// Tail points at tau (1 - 10^-k) for k in [tail_min_exp, tail_max_exp].
  int tail_min_exp = 3;
  int tail_max_exp = 12;
  double slope_tol = 1e-9;
  double convexity_tol = 1e-12;
  double divergence_threshold = 1e6;
};

ValidationReport validate_class(const KappaMap& map, ClassTarget target,
                                const ValidationGrid& grid = {});

/// Serialized record `{family, terms, tau}` where `terms` is a list of numeric
/// rows: [a,b,c] (rational), [a] (log), [a,b] (tan), [alpha,x_norm] (exp).
struct MapRecord {
  std::string family;
  std::vector<std::vector<double>> terms;
  double tau = 0.0;
};

MapRecord to_record(const KappaMap& map);
KappaMap from_record(const MapRecord& rec);

}  // namespace ptc::timewarp
