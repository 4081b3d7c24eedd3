#include "fhn/burst.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace fhn;
using fhn::ode::Vec;

namespace {

ode::Trajectory<2> circle(int knots, double t1) {
  std::vector<double> t;
  std::vector<Vec<2>> y, dy;
  for (int k = 0; k <= knots; ++k) {
    const double s = t1 * k / knots;
    t.push_back(s);
    y.push_back({std::sin(s), std::cos(s)});
    dy.push_back({std::cos(s), -std::sin(s)});
  }
  return ode::Trajectory<2>::from_knots(t, y, dy);
}

const ModelParams kP;

}  // namespace

TEST_CASE("unforced equilibrium") {
  const auto eq = unforced_equilibrium(kP);
  CHECK(eq.x == doctest::Approx(-1.1994).epsilon(1e-4));
  CHECK(eq.y == doctest::Approx(-1.4993).epsilon(1e-4));
  CHECK(eq.x - eq.x * eq.x * eq.x / 3 - eq.y - kP.a == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(eq.x - kP.b * eq.y == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("L2 norm oracles") {
  const auto flat = ode::Trajectory<2>::from_knots(
      {0.0, 1.0, 2.5, 4.0}, {Vec<2>{3, 4}, Vec<2>{3, 4}, Vec<2>{3, 4}, Vec<2>{3, 4}},
      {Vec<2>::Zero(), Vec<2>::Zero(), Vec<2>::Zero(), Vec<2>::Zero()});
  CHECK(l2_norm(flat, 2.0) == 5.0);
  CHECK(l2_norm(flat, 4.0) == 5.0);

  const double two_pi = 2 * std::numbers::pi;
  CHECK(std::abs(l2_norm(circle(2000, two_pi), two_pi) - 1.0) < 1e-8);
  CHECK(std::abs(l2_norm(circle(4000, 2 * two_pi), two_pi) - 1.0) < 1e-8);
}

TEST_CASE("three-spike burst at E = 0.55") {
  const Forcing f{0.55, 0.0149354};
  const auto run = simulate_standard(kP, f);
  CHECK(run.n_periods == 2);
  CHECK(count_spikes(run.trajectory, run.n_periods) == 3);

  const double l2 = l2_norm(run.trajectory, run.period);
  CHECK(l2 > 0.0);
  CHECK(std::abs(l2_norm(run.trajectory, run.period, 40000) - l2) < 1e-8);

  const auto seq = theta_sequence(run.trajectory, f);
  CHECK(seq.unwrapped.size() == 6);
  for (std::size_t k = 1; k < seq.unwrapped.size(); ++k)
    CHECK(seq.unwrapped[k] > seq.unwrapped[k - 1]);
  for (double w : seq.wrapped) {
    CHECK(w >= 0.0);
    CHECK(w < kTwoPi);
  }
  CHECK(seq.wrapped[0] == doctest::Approx(1.420).epsilon(1e-3));

  Protocol longer;
  longer.burn_in_periods = 4;
  const auto run4 = simulate_standard(kP, f, {}, longer);
  CHECK(count_spikes(run4.trajectory, run4.n_periods) == 3);

  const auto est = estimate_spike_count(run, kP, f);
  CHECK(est.estimate == 3);
  CHECK(est.theta_first == doctest::Approx(seq.wrapped[0]));
  CHECK(est.dtheta == doctest::Approx(est.theta_stable - est.theta_first));

  const auto m = measure(run, f);
  CHECK(m.spike_count == 3);
  CHECK(m.l2 == l2);
}

TEST_CASE("unforced run stays quiet") {
  const auto run = simulate_standard(kP, {0.0, 0.02});
  CHECK(count_spikes(run.trajectory, run.n_periods) == 0);
  CHECK(theta_sequence(run.trajectory, {0.0, 0.02}).unwrapped.empty());
  const auto eq = unforced_equilibrium(kP);
  CHECK(std::abs(run.trajectory.states.back()[0] - eq.x) < 1e-8);
}

TEST_CASE("canard classification") {
  auto classify = [](double omega, CanardSite site) {
    const Forcing f{0.482, omega};
    const auto run = simulate_standard(kP, f);
    return std::pair{classify_canard(run.trajectory, folded_equilibria(kP, f), site, kP, f),
                     count_spikes(run.trajectory, run.n_periods)};
  };
  const auto [a, na] = classify(0.02206875, CanardSite::Saddle);
  const auto [b, nb] = classify(0.0220625, CanardSite::Saddle);
  CHECK(a.outcome == CanardOutcome::JumpBack);
  CHECK(b.outcome == CanardOutcome::JumpAcross);
  CHECK(nb - na == 1);
  CHECK(b.dwell > 1.0 / kP.eps);

  CHECK(classify(0.0236, CanardSite::Node).first.outcome == CanardOutcome::JumpBack);
  CHECK(classify(0.02506875, CanardSite::Node).first.outcome == CanardOutcome::JumpBack);
  const auto c = classify(0.025075, CanardSite::Node).first;
  CHECK(c.outcome == CanardOutcome::JumpAcross);
  CHECK(c.t_entry <= c.t_exit);

  CHECK(classify(0.02, CanardSite::Saddle).first.outcome == CanardOutcome::FoldJump);

  // Region I has no folded equilibria to anchor on.
  const Forcing quiet{0.1, 0.02};
  const auto run = simulate_standard(kP, quiet);
  CHECK_THROWS_AS(classify_canard(run.trajectory, folded_equilibria(kP, quiet),
                                  CanardSite::Saddle, kP, quiet),
                  Error);
}

TEST_CASE("spike estimate formula") {
  CHECK(spike_estimate_formula(1.0, 0.02, 27.0) == 3);
  CHECK(spike_estimate_formula(0.0, 0.02) == 1);
  CHECK(spike_estimate_formula(-0.4, 0.02) == 1);
  CHECK(spike_estimate_formula(2.0, 0.02, 20.0) == 3);  // ceil(2.0) exactly
}

TEST_CASE("estimator needs a first spike") {
  const Forcing f{0.42, 0.035};
  const auto run = simulate_standard(kP, f);
  if (count_spikes(run.trajectory, run.n_periods) == 0) {
    try {
      estimate_spike_count(run, kP, f);
      FAIL("expected NoFirstSpike");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NoFirstSpike);
    }
  }
}
