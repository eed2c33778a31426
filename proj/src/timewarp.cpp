#include "ptc/timewarp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ptc/errors.hpp"

namespace ptc::timewarp {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

// coef * base^exp with the convention 0 * inf = 0 (a vanishing coefficient
// kills a singular power at t = 0).
double scaled_pow(double coef, double base, double exp) {
  if (coef == 0.0) return 0.0;
  return coef * std::pow(base, exp);
}

Jet eval_log_like(double amplitude, double tau, double t) {
  const double gap = tau - t;
  return {-amplitude * std::log(gap / tau), amplitude / gap, amplitude / (gap * gap)};
}

Jet eval_shape(const RationalSum& s, double tau, double t) {
  const double gap = tau - t;
  Jet j{0.0, 0.0, 0.0};
  for (const auto& [a, b, c] : s.terms) {
    j.value += a * std::pow(t, b) * std::pow(gap, -c);
    j.d1 += a * (scaled_pow(b, t, b - 1.0) * std::pow(gap, -c) +
                 c * std::pow(t, b) * std::pow(gap, -c - 1.0));
    j.d2 += a * (scaled_pow(b * (b - 1.0), t, b - 2.0) * std::pow(gap, -c) +
                 scaled_pow(2.0 * b * c, t, b - 1.0) * std::pow(gap, -c - 1.0) +
                 c * (c + 1.0) * std::pow(t, b) * std::pow(gap, -c - 2.0));
  }
  return j;
}

Jet eval_shape(const LogSum& s, double tau, double t) {
  double amplitude = 0.0;
  for (double a : s.a) amplitude += a;
  return eval_log_like(amplitude, tau, t);
}

Jet eval_shape(const TanSum& s, double tau, double t) {
  const double w = std::numbers::pi / (2.0 * tau);
  const double tn = std::tan(w * t);
  const double sec2 = 1.0 + tn * tn;
  Jet j{0.0, 0.0, 0.0};
  for (const auto& [a, b] : s.terms) {
    j.value += a * std::pow(tn, b);
    j.d1 += a * w * sec2 * scaled_pow(b, tn, b - 1.0);
    j.d2 += a * w * w * b * sec2 *
            (scaled_pow(b - 1.0, tn, b - 2.0) * sec2 + 2.0 * std::pow(tn, b));
  }
  return j;
}

Jet eval_shape(const ExpInverse& s, double tau, double t) {
  return eval_log_like(s.x_norm / s.alpha, tau, t);
}

bool all_finite(const Jet& j) {
  return std::isfinite(j.value) && std::isfinite(j.d1) && std::isfinite(j.d2);
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::RationalSum: return "rational_sum";
    case Family::LogSum: return "log_sum";
    case Family::TanSum: return "tan_sum";
    case Family::ExpInverse: return "exp_inverse";
  }
  return "unknown";
}

Family family_from_string(const std::string& s) {
  if (s == "rational_sum") return Family::RationalSum;
  if (s == "log_sum") return Family::LogSum;
  if (s == "tan_sum") return Family::TanSum;
  if (s == "exp_inverse") return Family::ExpInverse;
  throw DomainError("unknown mapping family '" + s + "'");
}

KappaMap::KappaMap(Shape shape, double tau) : shape_(std::move(shape)), tau_(tau) {
  if (!positive_finite(tau_)) throw DomainError("mapping horizon tau must be positive");
  std::visit(
      Overloaded{
          [](const RationalSum& s) {
            if (s.terms.empty()) throw DomainError("rational_sum needs at least one term");
            for (const auto& [a, b, c] : s.terms)
              if (!positive_finite(a) || !positive_finite(b) || !positive_finite(c))
                throw DomainError("rational_sum coefficients must be positive");
          },
          [](const LogSum& s) {
            if (s.a.empty()) throw DomainError("log_sum needs at least one term");
            for (double a : s.a)
              if (!positive_finite(a)) throw DomainError("log_sum coefficients must be positive");
          },
          [](const TanSum& s) {
            if (s.terms.empty()) throw DomainError("tan_sum needs at least one term");
            for (const auto& [a, b] : s.terms)
              if (!positive_finite(a) || !positive_finite(b))
                throw DomainError("tan_sum coefficients must be positive");
          },
          [](const ExpInverse& s) {
            if (!(s.alpha > 0.0 && s.alpha < 0.5))
              throw DomainError("exp_inverse requires 0 < alpha < 0.5");
            if (!positive_finite(s.x_norm)) throw DomainError("exp_inverse requires x_norm > 0");
          },
      },
      shape_);
}

KappaMap KappaMap::rational(double a, double b, double c, double tau) {
  return KappaMap(RationalSum{{{a, b, c}}}, tau);
}

Family KappaMap::family() const {
  return std::visit(Overloaded{
                        [](const RationalSum&) { return Family::RationalSum; },
                        [](const LogSum&) { return Family::LogSum; },
                        [](const TanSum&) { return Family::TanSum; },
                        [](const ExpInverse&) { return Family::ExpInverse; },
                    },
                    shape_);
}

double KappaMap::clamp_time() const { return tau_ * (1.0 - 1e-12); }

Jet eval_kappa_unclamped(const KappaMap& map, double t) {
  return std::visit([&](const auto& s) { return eval_shape(s, map.tau(), t); }, map.shape());
}

Jet eval_kappa(const KappaMap& map, double t) {
  if (!std::isfinite(t) || t < 0.0 || t >= map.tau())
    throw DomainError("kappa evaluated outside [0, tau): t = " + std::to_string(t));
  if (t > map.clamp_time())
    throw NonFinite("kappa evaluated within 1e-12 tau of its horizon: t = " + std::to_string(t));
  const Jet j = eval_kappa_unclamped(map, t);
  if (!all_finite(j)) throw NonFinite("kappa overflow at t = " + std::to_string(t));
  return j;
}

bool MuMap::has_closed_form() const {
  return std::visit(Overloaded{
                        [](const RationalSum& s) {
                          return s.terms.size() == 1 && s.terms[0].b == 1.0 && s.terms[0].c == 1.0;
                        },
                        [](const LogSum&) { return true; },
                        [](const TanSum&) { return false; },
                        [](const ExpInverse&) { return true; },
                    },
                    source_.shape());
}

namespace {

Jet mu_from_kappa_root(const KappaMap& k, double x) {
  const Jet kj = eval_kappa_unclamped(k, x);
  const double d1 = 1.0 / kj.d1;
  return {x, d1, -kj.d2 * d1 * d1 * d1};
}

Jet mu_log_like(double amplitude, double tau, double s) {
  const double decay = std::exp(-s / amplitude);
  double value = -tau * std::expm1(-s / amplitude);
  value = std::min(value, std::nextafter(tau, 0.0));
  return {value, tau / amplitude * decay, -tau / (amplitude * amplitude) * decay};
}

double solve_kappa_root(const KappaMap& k, double s) {
  constexpr int kMaxIterations = 200;
  constexpr int kBisectionIterations = 40;
  const double tol = 1e-12 * std::max(1.0, s);
  double lo = 0.0;
  double hi = k.tau() * (1.0 - 1e-15);
  if (eval_kappa_unclamped(k, hi).value < s)
    throw ConvergenceError("mu root lies beyond tau (1 - 1e-15) for s = " + std::to_string(s));

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < kMaxIterations; ++it) {
    const Jet j = eval_kappa_unclamped(k, x);
    const double residual = j.value - s;
    // On flat stretches a small residual still leaves x off by residual / kappa'.
    if (std::abs(residual) <= tol && std::abs(residual) <= 1e-14 * std::max(1.0, x) * j.d1) return x;
    if (residual < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) return x;

    double next = 0.5 * (lo + hi);
    if (it >= kBisectionIterations && std::isfinite(j.d1) && j.d1 > 0.0) {
      const double newton = x - residual / j.d1;
      if (newton > lo && newton < hi) next = newton;
    }
    x = next;
  }
  throw ConvergenceError("mu root finder exceeded 200 iterations for s = " + std::to_string(s));
}

}  // namespace

Jet eval_mu(const MuMap& mu, double s) {
  if (!std::isfinite(s) || s < 0.0)
    throw DomainError("mu evaluated at negative or non-finite s = " + std::to_string(s));
  const KappaMap& k = mu.kappa();
  const double tau = k.tau();

  if (const auto* e = std::get_if<ExpInverse>(&k.shape())) return mu_log_like(e->x_norm / e->alpha, tau, s);
  if (const auto* l = std::get_if<LogSum>(&k.shape())) {
    double amplitude = 0.0;
    for (double a : l->a) amplitude += a;
    return mu_log_like(amplitude, tau, s);
  }
  if (mu.has_closed_form()) {
    const double a = std::get<RationalSum>(k.shape()).terms[0].a;
    const double den = a + s;
    const double value = std::min(tau * s / den, std::nextafter(tau, 0.0));
    return {value, a * tau / (den * den), -2.0 * a * tau / (den * den * den)};
  }
  if (s == 0.0) return mu_from_kappa_root(k, 0.0);
  return mu_from_kappa_root(k, solve_kappa_root(k, s));
}

bool ValidationReport::passed() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const Condition& c) { return c.passed; });
}

const Condition* ValidationReport::find(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return &c;
  return nullptr;
}

ValidationReport validate_class(const KappaMap& map, ClassTarget target, const ValidationGrid& grid) {
  const double tau = map.tau();
  std::vector<double> ts;
  ts.reserve(grid.uniform_points + 16);
  const std::size_t n = std::max<std::size_t>(grid.uniform_points, 2);
  for (std::size_t i = 0; i < n; ++i)
    ts.push_back(0.999 * tau * static_cast<double>(i) / static_cast<double>(n - 1));
  for (int k = grid.tail_min_exp; k <= grid.tail_max_exp; ++k)
    ts.push_back(tau * (1.0 - std::pow(10.0, -k)));
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  std::vector<Jet> js;
  js.reserve(ts.size());
  for (double t : ts) js.push_back(eval_kappa_unclamped(map, t));

  ValidationReport rep;
  rep.target = target;

  Condition zero{"zero_at_origin", true, {}};
  if (js.front().value != 0.0) {
    zero.passed = false;
    zero.failing_t.push_back(0.0);
  }
  rep.conditions.push_back(zero);

  Condition mono{"monotone", true, {}};
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (!(js[i].value > js[i - 1].value)) {
      mono.passed = false;
      mono.failing_t.push_back(ts[i]);
    }
  }
  rep.conditions.push_back(mono);

  // Either the value near tau is already huge, or successive decades towards
  // tau keep adding at least as much as the previous one (slow logarithmic
  // divergence); a bounded function's increments shrink geometrically.
  Condition diverge{"diverges", true, {}};
  const double probe = eval_kappa_unclamped(map, tau * (1.0 - 1e-9)).value;
  if (!(probe > grid.divergence_threshold)) {
    bool growing = true;
    double prev_increment = 0.0;
    double prev_value = eval_kappa_unclamped(map, tau * (1.0 - 1e-3)).value;
    for (int k = 4; k <= 12; ++k) {
      const double v = eval_kappa_unclamped(map, tau * (1.0 - std::pow(10.0, -k))).value;
      const double inc = v - prev_value;
      if (!(inc > 0.0) || (k > 4 && inc < prev_increment * (1.0 - 1e-3))) {
        growing = false;
        diverge.failing_t.push_back(tau * (1.0 - std::pow(10.0, -k)));
      }
      prev_increment = inc;
      prev_value = v;
    }
    diverge.passed = growing;
  }
  rep.conditions.push_back(diverge);

  if (target == ClassTarget::K1) {
    Condition slope{"unit_slope", true, {}};
    if (!(std::abs(js.front().d1 - 1.0) <= grid.slope_tol)) {
      slope.passed = false;
      slope.failing_t.push_back(0.0);
    }
    rep.conditions.push_back(slope);

    Condition convex{"convex", true, {}};
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (!(js[i].d2 >= -grid.convexity_tol)) {
        convex.passed = false;
        convex.failing_t.push_back(ts[i]);
      }
    }
    rep.conditions.push_back(convex);
  }
  return rep;
}

MapRecord to_record(const KappaMap& map) {
  MapRecord rec;
  rec.family = to_string(map.family());
  rec.tau = map.tau();
  std::visit(Overloaded{
                 [&](const RationalSum& s) {
                   for (const auto& [a, b, c] : s.terms) rec.terms.push_back({a, b, c});
                 },
                 [&](const LogSum& s) {
                   for (double a : s.a) rec.terms.push_back({a});
                 },
                 [&](const TanSum& s) {
                   for (const auto& [a, b] : s.terms) rec.terms.push_back({a, b});
                 },
                 [&](const ExpInverse& s) { rec.terms.push_back({s.alpha, s.x_norm}); },
             },
             map.shape());
  return rec;
}

KappaMap from_record(const MapRecord& rec) {
  auto require_width = [&](std::size_t width) {
    for (const auto& row : rec.terms)
      if (row.size() != width)
        throw DomainError(rec.family + " terms must have " + std::to_string(width) + " entries each");
  };
  switch (family_from_string(rec.family)) {
    case Family::RationalSum: {
      require_width(3);
      RationalSum s;
      for (const auto& r : rec.terms) s.terms.push_back({r[0], r[1], r[2]});
      return KappaMap(std::move(s), rec.tau);
    }
    case Family::LogSum: {
      require_width(1);
      LogSum s;
      for (const auto& r : rec.terms) s.a.push_back(r[0]);
      return KappaMap(std::move(s), rec.tau);
    }
    case Family::TanSum: {
      require_width(2);
      TanSum s;
      for (const auto& r : rec.terms) s.terms.push_back({r[0], r[1]});
      return KappaMap(std::move(s), rec.tau);
    }
    case Family::ExpInverse: {
      require_width(2);
      if (rec.terms.size() != 1) throw DomainError("exp_inverse takes exactly one [alpha, x_norm] row");
      return KappaMap(ExpInverse{rec.terms[0][0], rec.terms[0][1]}, rec.tau);
    }
  }
  throw DomainError("unreachable mapping family");
}

}  // namespace ptc::timewarp
