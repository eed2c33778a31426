#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ptc/errors.hpp"
#include "ptc/sim.hpp"

using namespace ptc;
using namespace ptc::sim;
using doctest::Approx;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

const Mat P = -0.1 * Mat::Identity(2, 2);
const Mat D = -1.0 * Mat::Identity(2, 2);
const Vec target = v2(std::numbers::pi / 2, 0.0);

double kinetic(const dynamics::EulerLagrangeModel& m, const Vec& q, const Vec& qd) {
  return 0.5 * qd.dot(m.mass(q) * qd);
}

}  // namespace

TEST_CASE("philox known answers") {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normal draws have unit variance") {
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = philox_normal(5, 0, static_cast<std::uint64_t>(i));
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 5.0 / std::sqrt(n));
  CHECK(sq / n - mean * mean == Approx(1.0).epsilon(0.02));
  CHECK(philox_normal(5, 0, 17) == philox_normal(5, 0, 17));
  CHECK(philox_normal(5, 0, 17) != philox_normal(5, 1, 17));
}

TEST_CASE("wiener path statistics") {
  const int paths = 10000;
  const std::size_t steps = 100;
  double sq = 0.0, sq_sample = 0.0;
  for (int s = 0; s < paths; ++s) {
    const auto w = wiener_path(0.1, static_cast<std::uint64_t>(s), 0.01, steps, 1);
    REQUIRE(w.size() == steps + 1);
    CHECK(w.front()(0) == 0.0);
    sq += w.back()(0) * w.back()(0);
    const auto z = wiener_path(0.1, static_cast<std::uint64_t>(s), 0.01, steps, 1, WienerScaling::PerSample);
    sq_sample += z.back()(0) * z.back()(0);
  }
  // Var d(T) = std^2 T with T = 1 s; per-sample scaling gives std^2 * steps.
  CHECK(sq / paths == Approx(0.01).epsilon(0.05));
  CHECK(sq_sample / paths == Approx(1.0).epsilon(0.05));
}

TEST_CASE("equilibrium is held") {
  const auto m = dynamics::two_link_model();
  auto itc = control::pd_gravity_itc(m, P, D, target);
  IntegrationOptions opt;
  opt.horizon = 5.0;
  const auto run = integrate(m, itc, target, Vec::Zero(2), NoDisturbance{}, opt);
  CHECK(run.size() == 5001);
  for (std::size_t i = 0; i < run.size(); ++i) CHECK((run.q[i] - target).norm() <= 1e-9);
  CHECK(run.times.back() == Approx(5.0));
}

TEST_CASE("zero intensity gives a zero path") {
  for (const auto& v : wiener_path(0.0, 3, 1e-3, 50, 2)) CHECK(v.norm() == 0.0);
}

TEST_CASE("itc settles over the long horizon") {
  const auto m = dynamics::two_link_model();
  auto itc = control::pd_gravity_itc(m, P, D, target);
  IntegrationOptions opt;
  opt.horizon = 200.0;
  const auto run = integrate(m, itc, Vec::Zero(2), Vec::Zero(2), NoDisturbance{}, opt);
  CHECK((run.q.back() - target).norm() < 1e-3);
}

TEST_CASE("gravity-compensated free motion conserves kinetic energy") {
  const auto m = dynamics::two_link_model();
  control::ControlLaw comp([&](const Vec&, const Vec& q) { return m.gravity(q); }, {});
  IntegrationOptions opt;
  opt.horizon = 10.0;
  opt.step = 1e-3;
  const auto run = integrate(m, comp, v2(0.2, -0.4), v2(0.8, -0.5), NoDisturbance{}, opt);
  const double e0 = kinetic(m, run.q.front(), run.qd.front());
  double drift = 0.0;
  for (std::size_t i = 0; i < run.size(); ++i) drift = std::max(drift, std::abs(kinetic(m, run.q[i], run.qd[i]) - e0));
  CHECK(drift <= 1e-6);
}

TEST_CASE("fourth order convergence under step halving") {
  const auto m = dynamics::two_link_model();
  auto final_state = [&](double h) {
    auto itc = control::pd_gravity_itc(m, P, D, target);
    IntegrationOptions opt;
    opt.horizon = 2.0;
    opt.step = h;
    const auto run = integrate(m, itc, Vec::Zero(2), v2(1.0, -1.0), NoDisturbance{}, opt);
    Vec x(4);
    x << run.q.back(), run.qd.back();
    return x;
  };
  const Vec a = final_state(0.04), b = final_state(0.02), c = final_state(0.01);
  const double order = std::log2((a - b).norm() / (b - c).norm());
  CHECK(order >= 3.5);
}

TEST_CASE("refinement agrees with a fine fixed step") {
  const auto m = dynamics::two_link_model();
  auto run_with = [&](double h, int refine) {
    auto itc = control::pd_gravity_itc(m, P, D, target);
    IntegrationOptions opt;
    opt.horizon = 2.0;
    opt.step = h;
    opt.max_refine = refine;
    return integrate(m, itc, Vec::Zero(2), v2(3.0, -3.0), NoDisturbance{}, opt);
  };
  const auto coarse = run_with(0.05, 10);
  const auto fine = run_with(0.001, 0);
  CHECK(coarse.size() == 41);
  CHECK((coarse.q.back() - fine.q.back()).norm() <= 1e-6);
  IntegrationOptions bad;
  bad.max_refine = 41;
  auto itc = control::pd_gravity_itc(m, P, D, target);
  CHECK_THROWS_AS(integrate(m, itc, Vec::Zero(2), Vec::Zero(2), NoDisturbance{}, bad), DomainError);
}

TEST_CASE("seeded runs are reproducible") {
  const auto m = dynamics::two_link_model();
  auto run_seed = [&](std::uint64_t seed) {
    auto itc = control::pd_gravity_itc(m, P, D, target);
    IntegrationOptions opt;
    opt.horizon = 3.0;
    return integrate(m, itc, Vec::Zero(2), Vec::Zero(2), WienerDisturbance{0.1, seed}, opt);
  };
  const auto a = run_seed(4), b = run_seed(4), c = run_seed(5);
  REQUIRE(a.size() == b.size());
  bool same = true, differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    same = same && a.q[i] == b.q[i] && a.d[i] == b.d[i];
    differs = differs || a.d[i] != c.d[i];
  }
  CHECK(same);
  CHECK(differs);
  CHECK(a.d.front().norm() == 0.0);
}

TEST_CASE("replayed disturbance is held between samples") {
  const auto m = dynamics::two_link_model();
  control::ControlLaw zero([](const Vec&, const Vec&) { return Vec(Vec::Zero(2)); }, {});
  ReplayDisturbance rep{{0.0, 0.5}, {v2(1.0, 2.0), v2(-1.0, 0.0)}};
  IntegrationOptions opt;
  opt.horizon = 1.0;
  opt.step = 0.1;
  const auto run = integrate(m, zero, Vec::Zero(2), Vec::Zero(2), rep, opt);
  CHECK(run.d[2](0) == 1.0);
  CHECK(run.d[7](0) == -1.0);
}

TEST_CASE("divergence stops the run") {
  const auto m = dynamics::two_link_model();
  control::ControlLaw push([](const Vec&, const Vec&) { return Vec(Vec::Constant(2, 1e9)); }, {});
  IntegrationOptions opt;
  opt.horizon = 10.0;
  const auto run = integrate(m, push, Vec::Zero(2), Vec::Zero(2), NoDisturbance{}, opt);
  CHECK(run.diverged());
  CHECK(run.times.back() < 10.0);
}

TEST_CASE("plain ptc cannot run past its horizon") {
  const auto m = dynamics::two_link_model();
  const auto itc = control::pd_gravity_itc(m, P, D, target);
  auto ptc = control::ptc_synthesize(itc, m, timewarp::KappaMap::rational(20, 1, 1, 20), 0.0);
  IntegrationOptions opt;
  opt.horizon = 25.0;
  CHECK_THROWS_AS(integrate(m, ptc, Vec::Zero(2), Vec::Zero(2), NoDisturbance{}, opt), DomainError);
}

TEST_CASE("switch is recorded as an event") {
  const auto m = dynamics::two_link_model();
  const auto itc = control::pd_gravity_itc(m, P, D, target);
  auto law = control::ptc_switching(itc, m, timewarp::KappaMap::rational(20, 1, 1, 20), 0.0, 1.0, 0.0);
  IntegrationOptions opt;
  opt.horizon = 19.5;
  opt.step = 1e-3;
  const auto run = integrate(m, law, Vec::Zero(2), Vec::Zero(2), NoDisturbance{}, opt);
  REQUIRE(run.switch_time());
  CHECK(*run.switch_time() == Approx(19.0).epsilon(2e-3 / 19.0));
  CHECK(run.index_at(1.0) == 1000);
  CHECK(run.index_at(-5.0) == 0);
  CHECK(run.index_at(1e9) == run.size() - 1);
}

TEST_CASE("csv layout") {
  const auto m = dynamics::two_link_model();
  auto itc = control::pd_gravity_itc(m, P, D, target);
  IntegrationOptions opt;
  opt.horizon = 0.002;
  const auto run = integrate(m, itc, Vec::Zero(2), Vec::Zero(2), NoDisturbance{}, opt);
  std::ostringstream os;
  write_csv(run, os, "itc");
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,q1,q2,qd1,qd2,u1,u2,d1,d2,domain");
  int rows = 0;
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#') ++rows;
  CHECK(rows == 3);
}
