#include "fhn/burst.hpp"
#include "fhn/integrator.hpp"
#include "fhn/systems.hpp"

#include <doctest.h>

#include <cmath>

using namespace fhn;
using fhn::ode::Vec;
using fhn::ode::Mat;

namespace {

struct Decay {
  static constexpr int dim = 1;
  double k = 1.0;
  Vec<1> rhs(double, const Vec<1>& y) const { return -k * y; }
  Mat<1> jacobian(double, const Vec<1>&) const { return Mat<1>::Constant(-k); }
  Vec<1> time_derivative(double, const Vec<1>&) const { return Vec<1>::Zero(); }
};

// y' = cos t, exercised through the explicit time derivative.
struct Driven {
  static constexpr int dim = 1;
  Vec<1> rhs(double t, const Vec<1>&) const { return Vec<1>::Constant(std::cos(t)); }
  Mat<1> jacobian(double, const Vec<1>&) const { return Mat<1>::Zero(); }
  Vec<1> time_derivative(double t, const Vec<1>&) const { return Vec<1>::Constant(-std::sin(t)); }
};

struct Oscillator {
  static constexpr int dim = 2;
  Vec<2> rhs(double, const Vec<2>& y) const { return {y[1], -y[0]}; }
  Mat<2> jacobian(double, const Vec<2>&) const { return (Mat<2>() << 0, 1, -1, 0).finished(); }
  Vec<2> time_derivative(double, const Vec<2>&) const { return Vec<2>::Zero(); }
};

// Van der Pol with mu = 1000: the usual stiff stress case.
struct VanDerPol {
  static constexpr int dim = 2;
  double mu = 1000.0;
  Vec<2> rhs(double, const Vec<2>& y) const {
    return {y[1], mu * ((1 - y[0] * y[0]) * y[1]) - y[0]};
  }
  Mat<2> jacobian(double, const Vec<2>& y) const {
    return (Mat<2>() << 0, 1, -2 * mu * y[0] * y[1] - 1, mu * (1 - y[0] * y[0])).finished();
  }
  Vec<2> time_derivative(double, const Vec<2>&) const { return Vec<2>::Zero(); }
};

}  // namespace

TEST_CASE("exponential decay") {
  const auto tr = ode::integrate(Decay{}, Vec<1>::Constant(1.0), {0.0, 10.0}, {});
  CHECK(std::abs(tr.states.back()[0] - std::exp(-10.0)) < 1e-8);
  CHECK(tr.t_end() == 10.0);
  for (double t = 0.0; t <= 10.0; t += 0.37)
    CHECK(std::abs(tr.sample(t)[0] - std::exp(-t)) < 1e-6);
}

TEST_CASE("time-dependent right-hand side") {
  ode::IntegratorConfig cfg;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-12;
  const auto tr = ode::integrate(Driven{}, Vec<1>::Zero(), {0.0, 20.0}, cfg);
  CHECK(std::abs(tr.states.back()[0] - std::sin(20.0)) < 1e-8);
}

TEST_CASE("single step converges at fourth order") {
  const Oscillator sys;
  const Vec<2> y0{1.0, 0.0};
  double prev = 0.0;
  for (int k = 0; k < 5; ++k) {
    const double h = 0.2 / (1 << k);
    Vec<2> y1, err;
    std::size_t evals = 0;
    ode::rosenbrock_step(sys, 0.0, y0, sys.rhs(0.0, y0), h, y1, err, evals);
    const double e = (y1 - Vec<2>{std::cos(h), -std::sin(h)}).norm();
    if (k > 0) {
      // Local error O(h^5): halving h divides it by about 32.
      CHECK(std::log2(prev / e) > 4.6);
    }
    prev = e;
  }
}

TEST_CASE("stiff van der Pol completes") {
  ode::IntegratorConfig cfg;
  cfg.rel_tol = 1e-6;
  cfg.abs_tol = 1e-8;
  const auto tr = ode::integrate(VanDerPol{}, Vec<2>{2.0, 0.0}, {0.0, 3000.0}, cfg);
  CHECK(tr.t_end() == 3000.0);
  CHECK(tr.stats.accepted < 20000);
  // Period of the relaxation cycle is about (3 - 2 ln 2) mu = 1614.
  CHECK(tr.states.back()[0] > -2.1);
  CHECK(tr.states.back()[0] < 2.1);
}

TEST_CASE("dense output") {
  const auto tr = ode::integrate(Oscillator{}, Vec<2>{1.0, 0.0}, {0.0, 6.0}, {});
  for (std::size_t k = 0; k < tr.size(); ++k) CHECK(tr.sample(tr.times[k]) == tr.states[k]);
  for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
    const double tm = 0.5 * (tr.times[k] + tr.times[k + 1]);
    CHECK(std::abs(tr.sample(tm)[0] - std::cos(tm)) < 1e-6);
  }
  CHECK_THROWS_AS(tr.sample(6.5), Error);
  CHECK_THROWS_AS(tr.sample(-0.1), Error);
}

TEST_CASE("events are located on the dense output") {
  std::vector<ode::EventFunction<2>> events{
      {"zero_up", [](double, const Vec<2>& y) { return y[0]; }, ode::Direction::Rising},
      {"zero_any", [](double, const Vec<2>& y) { return y[0]; }, ode::Direction::Either}};
  const auto tr = ode::integrate(Oscillator{}, Vec<2>{1.0, 0.0}, {0.0, 13.0}, {}, events);
  int rising = 0;
  int any = 0;
  for (const auto& e : tr.events) {
    if (e.label == "zero_up") {
      CHECK(e.t == doctest::Approx((3 + 4 * rising) * std::numbers::pi / 2).epsilon(1e-7));
      ++rising;
    } else {
      ++any;
    }
  }
  CHECK(rising == 2);  // 3pi/2, 7pi/2
  CHECK(any == 4);  // pi/2, 3pi/2, 5pi/2, 7pi/2
}

TEST_CASE("configuration errors") {
  ode::IntegratorConfig cfg;
  cfg.rel_tol = 0.1;
  CHECK_THROWS_AS(ode::integrate(Decay{}, Vec<1>::Constant(1.0), {0.0, 1.0}, cfg), Error);
  CHECK_THROWS_AS(ode::integrate(Decay{}, Vec<1>::Constant(1.0), {1.0, 0.0}, {}), Error);

  ode::IntegratorConfig few;
  few.max_steps = 3;
  try {
    ode::integrate(Decay{}, Vec<1>::Constant(1.0), {0.0, 100.0}, few);
    FAIL("expected failure");
  } catch (const ode::IntegrationFailure<1>& e) {
    CHECK(e.kind() == ErrorKind::MaxStepsExceeded);
    CHECK(e.partial().size() >= 2);
  }
}

TEST_CASE("knot constructor validates input") {
  using Tr = ode::Trajectory<1>;
  CHECK_THROWS_AS(Tr::from_knots({0.0, 0.0}, {Vec<1>::Zero(), Vec<1>::Zero()},
                                 {Vec<1>::Zero(), Vec<1>::Zero()}),
                  Error);
  CHECK_THROWS_AS(Tr::from_knots({}, {}, {}), Error);
}

TEST_CASE("forced FHN run is tolerance-converged") {
  const ModelParams p;
  const Forcing f{0.55, 0.0149354};
  const auto run = simulate_standard(p, f);
  CHECK(run.trajectory.t_end() == doctest::Approx(4 * f.period()));
  CHECK(run.trajectory.t_begin() == doctest::Approx(2 * f.period()));

  ode::IntegratorConfig tight;
  tight.rel_tol = 0.5e-8;
  tight.abs_tol = 0.5e-10;
  const auto run2 = simulate_standard(p, f, tight);
  const double dx = std::abs(run.trajectory.states.back()[0] - run2.trajectory.states.back()[0]);
  MESSAGE("tolerance halving changes x(t_end) by " << dx);
  CHECK(dx < 1e-6);
}
