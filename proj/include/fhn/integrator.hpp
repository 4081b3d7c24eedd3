#pragma once

// Adaptive linearly implicit integration for small stiff systems.
//
// The stepper is the four-stage Rosenbrock method of order 4 with an embedded
// order-3 error estimate (Shampine's parameter set, gamma = 1/2). Each step
// factors W = I/(gamma h) - J once. Dense output is the cubic Hermite
// interpolant through the knot states and their derivatives, which is C1
// across knots. Events are sign changes of user functions g(t, y) localized
// by bisection on the dense output.

#include "fhn/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fhn::ode {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;
template <int N>
using Mat = Eigen::Matrix<double, N, N>;

enum class Method { Rosenbrock4 };

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  std::optional<double> max_step;
  Method method = Method::Rosenbrock4;
  std::size_t max_steps = 10'000'000;
  /// Initial step as a fraction of the integration span.
  double initial_step_fraction = 1e-4;
  /// Absolute time resolution of event localization.
  double event_time_tol = 1e-12;

  /// Throws ConfigError unless 0 < abs_tol <= rel_tol < 1e-2.
  void validate() const {
    if (!(abs_tol > 0.0 && abs_tol <= rel_tol && rel_tol < 1e-2))
      throw Error(ErrorKind::ConfigError, "tolerances must satisfy 0 < abs_tol <= rel_tol < 1e-2");
    if (max_step && !(*max_step > 0.0))
      throw Error(ErrorKind::ConfigError, "max_step must be positive");
    if (!(initial_step_fraction > 0.0 && initial_step_fraction <= 1.0))
      throw Error(ErrorKind::ConfigError, "initial_step_fraction must lie in (0, 1]");
    if (!(event_time_tol > 0.0))
      throw Error(ErrorKind::ConfigError, "event_time_tol must be positive");
  }
};

/// rhs, Jacobian with respect to the state, and explicit time derivative.
template <class S>
concept OdeSystem = requires(const S& s, double t, const Vec<S::dim>& y) {
  { S::dim } -> std::convertible_to<int>;
  { s.rhs(t, y) } -> std::convertible_to<Vec<S::dim>>;
  { s.jacobian(t, y) } -> std::convertible_to<Mat<S::dim>>;
  { s.time_derivative(t, y) } -> std::convertible_to<Vec<S::dim>>;
};

enum class Direction { Falling = -1, Either = 0, Rising = 1 };

template <int N>
struct EventFunction {
  std::string label;
  std::function<double(double, const Vec<N>&)> g;
  Direction direction = Direction::Either;
};

struct Event {
  double t = 0.0;
  std::string label;
  Direction direction = Direction::Either;  ///< actual crossing direction
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

/// Knot states plus a piecewise cubic Hermite interpolant between them.
template <int N>
class Trajectory {
 public:
  std::vector<double> times;
  std::vector<Vec<N>> states;
  std::vector<Vec<N>> derivatives;
  std::vector<Event> events;
  IntegrationStats stats;

  bool empty() const { return times.empty(); }
  std::size_t size() const { return times.size(); }
  double t_begin() const { return times.front(); }
  double t_end() const { return times.back(); }

  /// Index k with times[k] <= t <= times[k+1].
  std::size_t segment_of(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t k = static_cast<std::size_t>(it - times.begin());
    if (k == 0) return 0;
    k -= 1;
    return std::min(k, times.size() - 2);
  }

  /// Monomial coefficients in s = (t - t_k)/h_k of the Hermite cubic on
  /// segment k: y = c0 + s c1 + s^2 c2 + s^3 c3.
  std::array<Vec<N>, 4> segment_coefficients(std::size_t k) const {
    const double h = times[k + 1] - times[k];
    const Vec<N>& y0 = states[k];
    const Vec<N>& y1 = states[k + 1];
    const Vec<N> d0 = h * derivatives[k];
    const Vec<N> d1 = h * derivatives[k + 1];
    return {y0, d0, -3.0 * y0 - 2.0 * d0 + 3.0 * y1 - d1, 2.0 * y0 + d0 - 2.0 * y1 + d1};
  }

  Vec<N> evaluate_segment(std::size_t k, double t) const {
    const double h = times[k + 1] - times[k];
    const double s = (t - times[k]) / h;
    const auto c = segment_coefficients(k);
    return c[0] + s * (c[1] + s * (c[2] + s * c[3]));
  }

  /// Dense-output value; exact stored state at knot times.
  Vec<N> sample(double t) const {
    if (times.empty()) throw Error(ErrorKind::OutOfRange, "sample on empty trajectory");
    if (!(t >= times.front() && t <= times.back()))
      throw Error(ErrorKind::OutOfRange, "sample time outside the trajectory span");
    if (times.size() == 1) return states.front();
    const std::size_t k = segment_of(t);
    if (t == times[k]) return states[k];
    if (t == times[k + 1]) return states[k + 1];
    return evaluate_segment(k, t);
  }

  std::vector<Vec<N>> sample(std::span<const double> ts) const {
    std::vector<Vec<N>> out;
    out.reserve(ts.size());
    for (double t : ts) out.push_back(sample(t));
    return out;
  }

  /// Builds a trajectory from externally known knots (derivatives given).
  static Trajectory from_knots(std::vector<double> t, std::vector<Vec<N>> y,
                               std::vector<Vec<N>> dy) {
    if (t.size() != y.size() || t.size() != dy.size() || t.empty())
      throw Error(ErrorKind::DomainError, "knot arrays must be non-empty and of equal length");
    for (std::size_t i = 1; i < t.size(); ++i)
      if (!(t[i] > t[i - 1]))
        throw Error(ErrorKind::DomainError, "knot times must be strictly increasing");
    Trajectory tr;
    tr.times = std::move(t);
    tr.states = std::move(y);
    tr.derivatives = std::move(dy);
    return tr;
  }
};

/// Base of all integration failures; the typed subclass carries the partial
/// trajectory.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

template <int N>
class IntegrationFailure : public IntegrationError {
 public:
  IntegrationFailure(ErrorKind kind, const std::string& message, Trajectory<N> partial)
      : IntegrationError(kind, message), partial_(std::move(partial)) {}
  const Trajectory<N>& partial() const { return partial_; }

 private:
  Trajectory<N> partial_;
};

namespace detail {

// Shampine's Rosenbrock 4(3) coefficients.
inline constexpr double kGamma = 0.5;
inline constexpr double kA21 = 2.0;
inline constexpr double kA31 = 48.0 / 25.0;
inline constexpr double kA32 = 6.0 / 25.0;
inline constexpr double kC21 = -8.0;
inline constexpr double kC31 = 372.0 / 25.0;
inline constexpr double kC32 = 12.0 / 5.0;
inline constexpr double kC41 = -112.0 / 125.0;
inline constexpr double kC42 = -54.0 / 125.0;
inline constexpr double kC43 = -2.0 / 5.0;
inline constexpr double kB1 = 19.0 / 9.0;
inline constexpr double kB2 = 1.0 / 2.0;
inline constexpr double kB3 = 25.0 / 108.0;
inline constexpr double kB4 = 125.0 / 108.0;
inline constexpr double kE1 = 17.0 / 54.0;
inline constexpr double kE2 = 7.0 / 36.0;
inline constexpr double kE3 = 0.0;
inline constexpr double kE4 = 125.0 / 108.0;
inline constexpr double kC1X = 1.0 / 2.0;
inline constexpr double kC2X = -3.0 / 2.0;
inline constexpr double kC3X = 121.0 / 50.0;
inline constexpr double kC4X = 29.0 / 250.0;
inline constexpr double kA2X = 1.0;
inline constexpr double kA3X = 3.0 / 5.0;

inline constexpr double kSafety = 0.9;
inline constexpr double kGrow = 1.5;
inline constexpr double kShrink = 0.5;
inline constexpr double kErrCon = 0.1296;  // (kGrow / kSafety)^(-4)

template <int N>
bool all_finite(const Vec<N>& v) {
  return v.allFinite();
}

}  // namespace detail

/// One Rosenbrock step from (t, y) with derivative dydt. Writes the proposed
/// state and the embedded error vector. Exposed for order tests.
template <OdeSystem S>
void rosenbrock_step(const S& sys, double t, const Vec<S::dim>& y, const Vec<S::dim>& dydt,
                     double h, Vec<S::dim>& y_new, Vec<S::dim>& err, std::size_t& rhs_evals) {
  using namespace detail;
  constexpr int N = S::dim;
  const Mat<N> jac = sys.jacobian(t, y);
  const Vec<N> dfdt = sys.time_derivative(t, y);
  Mat<N> w = -jac;
  w.diagonal().array() += 1.0 / (kGamma * h);
  const Eigen::PartialPivLU<Mat<N>> lu(w);

  const Vec<N> g1 = lu.solve(dydt + h * kC1X * dfdt);
  Vec<N> ys = y + kA21 * g1;
  Vec<N> f = sys.rhs(t + kA2X * h, ys);
  const Vec<N> g2 = lu.solve(f + h * kC2X * dfdt + kC21 * g1 / h);
  ys = y + kA31 * g1 + kA32 * g2;
  f = sys.rhs(t + kA3X * h, ys);
  const Vec<N> g3 = lu.solve(f + h * kC3X * dfdt + (kC31 * g1 + kC32 * g2) / h);
  const Vec<N> g4 = lu.solve(f + h * kC4X * dfdt + (kC41 * g1 + kC42 * g2 + kC43 * g3) / h);
  y_new = y + kB1 * g1 + kB2 * g2 + kB3 * g3 + kB4 * g4;
  err = kE1 * g1 + kE2 * g2 + kE3 * g3 + kE4 * g4;
  rhs_evals += 2;
}

namespace detail {

template <int N>
double locate_root(const Trajectory<N>& tr, std::size_t k, const EventFunction<N>& ev,
                   double ga, double tol) {
  double ta = tr.times[k];
  double tb = tr.times[k + 1];
  while (tb - ta > tol) {
    const double tm = 0.5 * (ta + tb);
    if (tm <= ta || tm >= tb) break;
    const double gm = ev.g(tm, tr.evaluate_segment(k, tm));
    if ((gm < 0.0) == (ga < 0.0) && gm != 0.0) {
      ta = tm;
      ga = gm;
    } else {
      tb = tm;
    }
  }
  return 0.5 * (ta + tb);
}

}  // namespace detail

/// Integrates sys from y0 over [t_span.first, t_span.second]. Throws
/// IntegrationFailure<dim> (with the partial trajectory) on step-size
/// underflow, step budget exhaustion or a non-finite state.
template <OdeSystem S>
Trajectory<S::dim> integrate(const S& sys, const Vec<S::dim>& y0,
                             std::pair<double, double> t_span, const IntegratorConfig& config,
                             const std::vector<EventFunction<S::dim>>& events = {}) {
  using namespace detail;
  constexpr int N = S::dim;
  config.validate();
  const auto [t0, t1] = t_span;
  if (!(std::isfinite(t0) && std::isfinite(t1) && t1 > t0))
    throw Error(ErrorKind::DomainError, "t_span must be finite and increasing");
  if (!all_finite<N>(y0)) throw Error(ErrorKind::NonFiniteState, "initial state is not finite");

  Trajectory<N> tr;
  const double span = t1 - t0;
  const double h_max = config.max_step.value_or(span);
  double h = std::min(config.initial_step_fraction * span, h_max);

  double t = t0;
  Vec<N> y = y0;
  Vec<N> dydt = sys.rhs(t, y);
  tr.stats.rhs_evals = 1;
  if (!all_finite<N>(dydt)) throw Error(ErrorKind::NonFiniteState, "rhs not finite at t0");
  tr.times.push_back(t);
  tr.states.push_back(y);
  tr.derivatives.push_back(dydt);

  std::vector<double> g_prev(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) g_prev[i] = events[i].g(t, y);

  auto fail = [&](ErrorKind kind, const std::string& what) {
    throw IntegrationFailure<N>(kind, what, tr);
  };

  Vec<N> y_new;
  Vec<N> err;
  std::size_t steps = 0;
  bool last_reject_nonfinite = false;
  while (t < t1) {
    if (++steps > config.max_steps)
      fail(ErrorKind::MaxStepsExceeded, "maximum number of steps exceeded");
    bool final_step = false;
    if (t + h >= t1) {
      h = t1 - t;
      final_step = true;
    }
    const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < h_min) {
      fail(last_reject_nonfinite ? ErrorKind::NonFiniteState : ErrorKind::StepSizeUnderflow,
           "step size underflow at t = " + std::to_string(t));
    }

    rosenbrock_step(sys, t, y, dydt, h, y_new, err, tr.stats.rhs_evals);

    double err_max = 0.0;
    bool finite = all_finite<N>(y_new) && all_finite<N>(err);
    if (finite) {
      for (int i = 0; i < N; ++i) {
        const double scale =
            config.abs_tol + config.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        err_max = std::max(err_max, std::abs(err[i]) / scale);
      }
      finite = std::isfinite(err_max);
    }
    if (!finite) {
      ++tr.stats.rejected;
      last_reject_nonfinite = true;
      h *= 0.25;
      continue;
    }
    if (err_max > 1.0) {
      ++tr.stats.rejected;
      last_reject_nonfinite = false;
      h = std::max(kSafety * h * std::pow(err_max, -1.0 / 3.0), kShrink * h);
      continue;
    }

    const double t_new = final_step ? t1 : t + h;
    const Vec<N> dydt_new = sys.rhs(t_new, y_new);
    ++tr.stats.rhs_evals;
    if (!all_finite<N>(dydt_new)) {
      ++tr.stats.rejected;
      last_reject_nonfinite = true;
      h *= 0.25;
      continue;
    }
    last_reject_nonfinite = false;
    ++tr.stats.accepted;

    tr.times.push_back(t_new);
    tr.states.push_back(y_new);
    tr.derivatives.push_back(dydt_new);
    const std::size_t k = tr.times.size() - 2;

    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto& ev = events[i];
      const double g1 = ev.g(t_new, y_new);
      const double g0 = g_prev[i];
      const bool rising = g0 < 0.0 && g1 >= 0.0;
      const bool falling = g0 > 0.0 && g1 <= 0.0;
      const bool wanted = (rising && ev.direction != Direction::Falling) ||
                          (falling && ev.direction != Direction::Rising);
      if (wanted) {
        const double te = locate_root(tr, k, ev, g0, config.event_time_tol);
        tr.events.push_back({te, ev.label, rising ? Direction::Rising : Direction::Falling});
      }
      g_prev[i] = g1;
    }
    // Events from different functions within one step are kept in time order.
    if (events.size() > 1) {
      auto first_new = tr.events.end();
      while (first_new != tr.events.begin() && (first_new - 1)->t >= tr.times[k]) --first_new;
      std::stable_sort(first_new, tr.events.end(),
                       [](const Event& a, const Event& b) { return a.t < b.t; });
    }

    t = t_new;
    y = y_new;
    dydt = dydt_new;

    double h_next = err_max > kErrCon ? kSafety * h * std::pow(err_max, -0.25) : kGrow * h;
    h = std::min(h_next, h_max);
  }
  return tr;
}

}  // namespace fhn::ode
