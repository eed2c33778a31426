#include <doctest.h>

#include <cmath>
#include <random>

#include "ptc/errors.hpp"
#include "ptc/timewarp.hpp"

using namespace ptc;
using namespace ptc::timewarp;
using doctest::Approx;

namespace {

KappaMap paper_map() { return KappaMap::rational(20, 1, 1, 20); }

// Random smooth map of each family.
KappaMap random_map(std::mt19937_64& rng, int family) {
  std::uniform_real_distribution<double> coef(0.2, 3.0), upper(2.0, 3.0), horizon(0.5, 30.0);
  // Exponents strictly between 1 and 2 have an unbounded second derivative at 0.
  auto expo = [&](std::mt19937_64& g) { return g() % 2 ? 1.0 : upper(g); };
  const double tau = horizon(rng);
  switch (family) {
    case 0: {
      RationalSum r;
      const int n = 1 + static_cast<int>(rng() % 3);
      for (int i = 0; i < n; ++i) r.terms.push_back({coef(rng), expo(rng), expo(rng)});
      return KappaMap(r, tau);
    }
    case 1: {
      LogSum l;
      const int n = 1 + static_cast<int>(rng() % 3);
      for (int i = 0; i < n; ++i) l.a.push_back(coef(rng));
      return KappaMap(l, tau);
    }
    default: {
      TanSum s;
      const int n = 1 + static_cast<int>(rng() % 3);
      for (int i = 0; i < n; ++i) s.terms.push_back({coef(rng), expo(rng)});
      return KappaMap(s, tau);
    }
  }
}

}  // namespace

TEST_CASE("rational kappa jets match hand differentiation") {
  const auto k = paper_map();
  const Jet j0 = eval_kappa(k, 0.0);
  CHECK(j0.value == 0.0);
  CHECK(j0.d1 == Approx(1.0).epsilon(1e-15));
  CHECK(j0.d2 == Approx(0.1).epsilon(1e-15));
  const Jet j10 = eval_kappa(k, 10.0);
  CHECK(j10.value == Approx(20.0).epsilon(1e-15));
  CHECK(j10.d1 == Approx(4.0).epsilon(1e-15));
  CHECK(j10.d2 == Approx(0.8).epsilon(1e-15));
}

TEST_CASE("multi-term jets match high-precision reference values") {
  // Reference values from 40-digit numerical differentiation.
  SUBCASE("tan family") {
    const KappaMap k(TanSum{{{2.0, 1.5}}}, 3.0);
    const Jet j = eval_kappa(k, 1.0);
    CHECK(j.value == Approx(0.87738267530166164055).epsilon(1e-13));
    CHECK(j.d1 == Approx(1.5913961386522710761).epsilon(1e-13));
    CHECK(j.d2 == Approx(1.9243155363548523187).epsilon(1e-13));
  }
  SUBCASE("log family") {
    const KappaMap k(LogSum{{0.5, 1.5}}, 4.0);
    const Jet j = eval_kappa(k, 2.5);
    CHECK(j.value == Approx(1.9616585060234524737).epsilon(1e-13));
    CHECK(j.d1 == Approx(4.0 / 3.0).epsilon(1e-13));
    CHECK(j.d2 == Approx(8.0 / 9.0).epsilon(1e-13));
  }
  SUBCASE("rational family, two terms") {
    const KappaMap k(RationalSum{{{1.0, 2.0, 1.0}, {0.5, 1.0, 2.0}}}, 5.0);
    const Jet j = eval_kappa(k, 3.0);
    CHECK(j.value == Approx(4.875).epsilon(1e-14));
    CHECK(j.d1 == Approx(5.75).epsilon(1e-14));
    CHECK(j.d2 == Approx(7.0625).epsilon(1e-14));
  }
}

TEST_CASE("every family is zero at the origin") {
  std::mt19937_64 rng(11);
  for (int f = 0; f < 3; ++f)
    for (int i = 0; i < 20; ++i) CHECK(eval_kappa(random_map(rng, f), 0.0).value == 0.0);
  CHECK(eval_kappa(KappaMap(ExpInverse{0.45, 10.525}, 20.0), 0.0).value == 0.0);
}

TEST_CASE("kappa evaluation domain") {
  const auto k = paper_map();
  CHECK_THROWS_AS(eval_kappa(k, -1e-9), DomainError);
  CHECK_THROWS_AS(eval_kappa(k, 20.0), DomainError);
  CHECK_THROWS_AS(eval_kappa(k, 25.0), DomainError);
  CHECK_THROWS_AS(eval_kappa(k, 20.0 * (1.0 - 1e-14)), NonFinite);
  CHECK_NOTHROW(eval_kappa(k, 20.0 * (1.0 - 1e-11)));
  CHECK(k.clamp_time() == Approx(20.0 * (1.0 - 1e-12)));
}

TEST_CASE("invalid coefficients are rejected") {
  CHECK_THROWS_AS(KappaMap::rational(0.0, 1, 1, 20), DomainError);
  CHECK_THROWS_AS(KappaMap::rational(1.0, 1, 1, -1), DomainError);
  CHECK_THROWS_AS(KappaMap(LogSum{{}}, 5.0), DomainError);
  CHECK_THROWS_AS(KappaMap(ExpInverse{0.5, 1.0}, 5.0), DomainError);
  CHECK_THROWS_AS(KappaMap(ExpInverse{0.2, 0.0}, 5.0), DomainError);
}

TEST_CASE("mu inverts the paper map") {
  const MuMap mu(paper_map());
  CHECK(mu.has_closed_form());
  const Jet m20 = eval_mu(mu, 20.0);
  CHECK(m20.value == Approx(10.0).epsilon(1e-14));
  CHECK(m20.d1 == Approx(0.25).epsilon(1e-14));
  const Jet m0 = eval_mu(mu, 0.0);
  CHECK(m0.value == 0.0);
  CHECK(m0.d1 == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("numeric inversion agrees with high-precision roots") {
  const MuMap rat(KappaMap(RationalSum{{{1.0, 2.0, 1.0}, {0.5, 1.0, 2.0}}}, 5.0));
  CHECK_FALSE(rat.has_closed_form());
  const Jet a = eval_mu(rat, 10.0);
  CHECK(a.value == Approx(3.5866822776447962134).epsilon(1e-12));
  CHECK(a.d1 == Approx(0.076706734376211024081).epsilon(1e-10));
  CHECK(a.d2 == Approx(-0.0095306914894783508432).epsilon(1e-9));

  const MuMap tan(KappaMap(TanSum{{{2.0, 1.5}}}, 3.0));
  const Jet b = eval_mu(tan, 7.0);
  CHECK(b.value == Approx(2.2182958674697332326).epsilon(1e-12));
  CHECK(b.d1 == Approx(0.066407544038657063937).epsilon(1e-10));
  CHECK(b.d2 == Approx(-0.013807994937345316592).epsilon(1e-9));
}

TEST_CASE("exponential mu approaches its horizon") {
  const MuMap mu(KappaMap(ExpInverse{0.4, 10.525}, 20.0));
  CHECK(mu.has_closed_form());
  CHECK(eval_mu(mu, 10.525 / 0.4 * std::log(2.0)).value == Approx(10.0).epsilon(1e-13));
  const double far = eval_mu(mu, 1e4).value;
  CHECK(far < 20.0);
  CHECK(far == Approx(20.0).epsilon(1e-12));
  CHECK(eval_mu(mu, 0.0).d1 == Approx(0.4 * 20.0 / 10.525).epsilon(1e-14));
}

TEST_CASE("class validation") {
  CHECK(validate_class(paper_map(), ClassTarget::K1).passed());
  const auto slow = validate_class(KappaMap::rational(1, 1, 1, 20), ClassTarget::K1);
  CHECK_FALSE(slow.passed());
  REQUIRE(slow.find("unit_slope") != nullptr);
  CHECK_FALSE(slow.find("unit_slope")->passed);
  CHECK(slow.find("monotone")->passed);
  CHECK(validate_class(KappaMap::rational(1, 1, 1, 20), ClassTarget::K).passed());
  CHECK(validate_class(KappaMap(LogSum{{1.0}}, 5.0), ClassTarget::K).passed());
  CHECK(validate_class(KappaMap(ExpInverse{0.45, 10.525}, 20.0), ClassTarget::K).passed());
}

TEST_CASE("property: round trip kappa(mu(s)) = s on a log grid") {
  std::mt19937_64 rng(2024);
  for (int f = 0; f < 3; ++f) {
    for (int i = 0; i < 30; ++i) {
      const auto k = random_map(rng, f);
      const MuMap mu(k);
      // Largest s with a representable preimage; logarithmic maps saturate early.
      const double top = eval_kappa_unclamped(k, std::nextafter(k.tau(), 0.0)).value;
      for (double e = -3.0; e <= 4.0; e += 0.25) {
        const double s = std::pow(10.0, e);
        const Jet m = eval_mu(mu, s);
        REQUIRE(m.value >= 0.0);
        REQUIRE(m.value < k.tau());
        if (s >= top) {
          CHECK(m.value >= std::nextafter(std::nextafter(k.tau(), 0.0), 0.0));
          continue;
        }
        const Jet back = eval_kappa_unclamped(k, m.value);
        // Near tau one ulp of t moves kappa by kappa' * ulp; no double does better.
        const double ulp = std::nextafter(k.tau(), 0.0) - k.tau();
        const double tol = 1e-8 * std::max(1.0, s) + 4.0 * std::abs(back.d1 * ulp);
        CHECK(std::abs(back.value - s) <= tol);
      }
    }
  }
}

TEST_CASE("property: mu(kappa(t)) = t and inverse derivative identities") {
  std::mt19937_64 rng(7);
  for (int f = 0; f < 3; ++f) {
    for (int i = 0; i < 20; ++i) {
      const auto k = random_map(rng, f);
      const MuMap mu(k);
      for (int g = 0; g < 50; ++g) {
        const double t = 0.999 * k.tau() * g / 50.0;
        const Jet kj = eval_kappa(k, t);
        const Jet m = eval_mu(mu, kj.value);
        CHECK(std::abs(m.value - t) <= 1e-8 * std::max(1.0, t));
        const Jet at = eval_kappa(k, m.value);
        if (at.d1 == 0.0) continue;  // flat start, mu' is unbounded there
        CHECK(std::abs(m.d1 - 1.0 / at.d1) <= 1e-8 * std::max(1.0, std::abs(m.d1)));
        CHECK(std::abs(at.d2 * m.d1 * m.d1 + at.d1 * m.d2) <= 1e-6 * std::max(1.0, std::abs(at.d2 * m.d1 * m.d1)));
      }
    }
  }
}

TEST_CASE("property: mu is nondecreasing and bounded by tau") {
  std::mt19937_64 rng(99);
  for (int f = 0; f < 3; ++f) {
    const auto k = random_map(rng, f);
    const MuMap mu(k);
    double prev = -1.0;
    for (double s = 0.0; s < 1e5; s = s * 1.7 + 0.01) {
      const double v = eval_mu(mu, s).value;
      CHECK(v >= prev);
      CHECK(v < k.tau());
      prev = v;
    }
  }
}

TEST_CASE("property: analytic derivatives match central differences") {
  std::mt19937_64 rng(5);
  for (int f = 0; f < 3; ++f) {
    for (int i = 0; i < 20; ++i) {
      const auto k = random_map(rng, f);
      for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double t = frac * k.tau();
        const double h = 1e-5 * k.tau();
        const Jet j = eval_kappa(k, t);
        const double d1 = (eval_kappa(k, t + h).value - eval_kappa(k, t - h).value) / (2 * h);
        const double d2 = (eval_kappa(k, t + h).d1 - eval_kappa(k, t - h).d1) / (2 * h);
        CHECK(d1 == Approx(j.d1).epsilon(1e-5));
        CHECK(d2 == Approx(j.d2).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("property: sum of two maps stays a class-K map") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) {
    auto a = random_map(rng, static_cast<int>(rng() % 3));
    auto b = random_map(rng, static_cast<int>(rng() % 3));
    // Evaluate both on a common horizon by rescaling time.
    const double tau = std::min(a.tau(), b.tau());
    CHECK(eval_kappa(a, 0.0).value + eval_kappa(b, 0.0).value == 0.0);
    double prev = -1.0;
    for (int g = 0; g < 10000; ++g) {
      const double t = 0.999 * tau * g / 10000.0;
      const double v = eval_kappa(a, t * a.tau() / tau).value + eval_kappa(b, t * b.tau() / tau).value;
      REQUIRE(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("map records round trip") {
  for (const KappaMap& k : {paper_map(), KappaMap(LogSum{{1.0, 2.0}}, 5.0), KappaMap(TanSum{{{1.0, 2.0}}}, 3.0),
                            KappaMap(ExpInverse{0.45, 10.525}, 20.0)}) {
    const MapRecord r = to_record(k);
    CHECK(from_record(r) == k);
  }
  MapRecord bad{"exp_inverse", {{0.45, 10.0}, {0.3, 1.0}}, 20.0};
  CHECK_THROWS_AS(from_record(bad), DomainError);
  MapRecord wrong{"rational_sum", {{1.0, 2.0}}, 20.0};
  CHECK_THROWS_AS(from_record(wrong), DomainError);
  CHECK_THROWS_AS(family_from_string("cubic"), DomainError);
}
