#include "fhn/burst.hpp"

#include "fhn/error.hpp"
#include "fhn/kernels.hpp"
#include "fhn/systems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace fhn {

namespace {

using Traj = ode::Trajectory<2>;

// Resampled x(t) on a uniform grid with crossing refinement on the dense
// output.
class LevelScanner {
 public:
  LevelScanner(const Traj& tr, double step) : tr_(tr) {
    const double t0 = tr.t_begin();
    const double span = tr.t_end() - t0;
    const auto n = static_cast<std::size_t>(std::ceil(span / step));
    t_.resize(n + 1);
    x_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      t_[i] = i == n ? tr.t_end() : t0 + span * static_cast<double>(i) / static_cast<double>(n);
      x_[i] = tr.sample(t_[i])[0];
    }
  }

  std::size_t size() const { return t_.size(); }
  double t(std::size_t i) const { return t_[i]; }
  double x(std::size_t i) const { return x_[i]; }

  /// First grid index i >= 0 with t(i) >= t.
  std::size_t index_at(double t) const {
    auto it = std::lower_bound(t_.begin(), t_.end(), t);
    return std::min(static_cast<std::size_t>(it - t_.begin()), t_.size() - 1);
  }

  // Crossing between samples i-1 and i.
  bool rises(std::size_t i, double level) const { return x_[i - 1] < level && x_[i] >= level; }
  bool falls(std::size_t i, double level) const { return x_[i - 1] >= level && x_[i] < level; }

  /// First i in [from, to) with a crossing of the requested kind.
  std::optional<std::size_t> next(std::size_t from, std::size_t to, double level,
                                  bool rising) const {
    for (std::size_t i = std::max<std::size_t>(from, 1); i < std::min(to, t_.size()); ++i)
      if (rising ? rises(i, level) : falls(i, level)) return i;
    return std::nullopt;
  }

  /// Last i in [from, to) with a crossing of the requested kind.
  std::optional<std::size_t> last(std::size_t from, std::size_t to, double level,
                                  bool rising) const {
    for (std::size_t i = std::min(to, t_.size()); i-- > std::max<std::size_t>(from, 1);)
      if (rising ? rises(i, level) : falls(i, level)) return i;
    return std::nullopt;
  }

  /// Crossing time between samples i-1 and i, by bisection on the dense output.
  double refine(std::size_t i, double level) const {
    double ta = t_[i - 1];
    double tb = t_[i];
    const bool below_a = x_[i - 1] < level;
    for (int k = 0; k < 60 && tb - ta > 1e-12; ++k) {
      const double tm = 0.5 * (ta + tb);
      if ((tr_.sample(tm)[0] < level) == below_a) ta = tm; else tb = tm;
    }
    return 0.5 * (ta + tb);
  }

 private:
  const Traj& tr_;
  std::vector<double> t_;
  std::vector<double> x_;
};

}  // namespace

StateXY unforced_equilibrium(const ModelParams& p) {
  p.validate();
  // h is strictly decreasing for 0 < b < 1.
  auto h = [&](double x) { return x * (1.0 - 1.0 / p.b) - x * x * x / 3.0 - p.a; };
  auto dh = [&](double x) { return (1.0 - 1.0 / p.b) - x * x; };
  double lo = -std::cbrt(3.0 * p.a) - 1.0;
  double hi = 0.0;
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    const double hx = h(x);
    if (hx == 0.0) break;
    if (hx > 0.0) lo = x; else hi = x;
    double next = x - hx / dh(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
      x = next;
      break;
    }
    x = next;
  }
  return {x, x / p.b, 0.0};
}

StandardRun simulate_standard(const ModelParams& p, const Forcing& f,
                              const ode::IntegratorConfig& config, const Protocol& protocol) {
  p.validate();
  f.validate(p);
  if (protocol.burn_in_periods < 0 || protocol.measure_periods < 1)
    throw Error(ErrorKind::ConfigError, "protocol needs burn_in >= 0 and measure >= 1 periods");
  const ForcedSystem sys{p, f};
  const double period = f.period();
  const StateXY eq = unforced_equilibrium(p);
  ode::Vec<2> y0{eq.x, eq.y};

  const double t_meas = period * protocol.burn_in_periods;
  if (protocol.burn_in_periods > 0) {
    const auto burn = ode::integrate(sys, y0, {0.0, t_meas}, config);
    y0 = burn.states.back();
  }

  std::vector<ode::EventFunction<2>> events;
  auto x_minus_one = [](double, const ode::Vec<2>& y) { return y[0] - 1.0; };
  events.push_back({std::string(kEventUp), x_minus_one, ode::Direction::Rising});
  events.push_back({std::string(kEventDown), x_minus_one, ode::Direction::Falling});
  events.push_back({std::string(kEventMin),
                    [&sys](double t, const ode::Vec<2>& y) { return sys.rhs(t, y)[0]; },
                    ode::Direction::Rising});

  StandardRun run;
  run.period = period;
  run.n_periods = protocol.measure_periods;
  run.trajectory = ode::integrate(
      sys, y0, {t_meas, t_meas + period * protocol.measure_periods}, config, events);

  auto& evs = run.trajectory.events;
  std::erase_if(evs, [&](const ode::Event& e) {
    return e.label == kEventMin && !(run.trajectory.sample(e.t)[0] < kReturnLevel);
  });
  return run;
}

int count_spikes(const ode::Trajectory<2>& tr, int n_periods) {
  if (n_periods < 1) throw Error(ErrorKind::DomainError, "n_periods must be >= 1");
  const auto ups = std::count_if(tr.events.begin(), tr.events.end(),
                                 [](const ode::Event& e) { return e.label == kEventUp; });
  return static_cast<int>(ups / n_periods);
}

double l2_norm(const ode::Trajectory<2>& tr, double period, int samples_per_period) {
  if (tr.size() < 2) throw Error(ErrorKind::DomainError, "trajectory needs at least two knots");
  if (!(period > 0.0) || samples_per_period < 1)
    throw Error(ErrorKind::DomainError, "period and sample count must be positive");
  const double t0 = tr.t_begin();
  const double span = tr.t_end() - t0;
  const double periods = std::round(span / period);
  if (periods < 1.0 || std::abs(span - periods * period) > 1e-9 * span)
    throw Error(ErrorKind::DomainError, "trajectory span is not a whole number of periods");
  const auto m = static_cast<std::size_t>(periods) * static_cast<std::size_t>(samples_per_period);
  const double h = span / static_cast<double>(m);

  constexpr std::size_t kChunk = 4096;
  std::vector<double> s(kChunk);
  std::vector<double> cx[4];
  std::vector<double> cy[4];
  for (int k = 0; k < 4; ++k) {
    cx[k].resize(kChunk);
    cy[k].resize(kChunk);
  }
  std::vector<double> xs(kChunk);
  std::vector<double> ys(kChunk);

  std::size_t seg = 0;
  auto coeffs = tr.segment_coefficients(0);
  double sum = 0.0;
  for (std::size_t base = 0; base < m; base += kChunk) {
    const std::size_t n = std::min(kChunk, m - base);
    for (std::size_t j = 0; j < n; ++j) {
      const double t = t0 + (static_cast<double>(base + j) + 0.5) * h;
      bool moved = false;
      while (seg + 2 < tr.size() && tr.times[seg + 1] < t) {
        ++seg;
        moved = true;
      }
      if (moved) coeffs = tr.segment_coefficients(seg);
      s[j] = (t - tr.times[seg]) / (tr.times[seg + 1] - tr.times[seg]);
      for (std::size_t k = 0; k < 4; ++k) {
        cx[k][j] = coeffs[k][0];
        cy[k][j] = coeffs[k][1];
      }
    }
    const std::span<const double> sv(s.data(), n);
    kernels::cubic_eval(sv, {{cx[0].data(), n}, {cx[1].data(), n}, {cx[2].data(), n}, {cx[3].data(), n}},
                        {xs.data(), n});
    kernels::cubic_eval(sv, {{cy[0].data(), n}, {cy[1].data(), n}, {cy[2].data(), n}, {cy[3].data(), n}},
                        {ys.data(), n});
    sum += kernels::sum_squares2({xs.data(), n}, {ys.data(), n});
  }
  return std::sqrt(sum / static_cast<double>(m));
}

ThetaSequence theta_sequence(const ode::Trajectory<2>& tr, const Forcing& f) {
  ThetaSequence out;
  bool armed = false;
  for (const auto& e : tr.events) {
    if (e.label == kEventUp) {
      armed = true;
    } else if (armed && e.label == kEventMin && tr.sample(e.t)[0] < kReturnLevel) {
      const double th = f.omega * e.t;
      out.unwrapped.push_back(th);
      out.wrapped.push_back(wrap_angle(th));
      out.times.push_back(e.t);
      armed = false;
    }
  }
  return out;
}

std::string_view to_string(CanardSite site) { return site == CanardSite::Node ? "node" : "saddle"; }

std::string_view to_string(CanardOutcome outcome) {
  switch (outcome) {
    case CanardOutcome::JumpBack: return "jump_back";
    case CanardOutcome::JumpAcross: return "jump_across";
    case CanardOutcome::FoldJump: return "fold_jump";
  }
  return "unknown";
}

CanardClass classify_canard(const ode::Trajectory<2>& tr,
                            const std::vector<FoldedEquilibrium>& equilibria, CanardSite site,
                            const ModelParams& p, const Forcing& f, const CanardOptions& options) {
  if (tr.size() < 2) throw Error(ErrorKind::NoPassage, "empty trajectory");
  const FoldedEquilibrium& eq =
      find_equilibrium(equilibria, FoldSide::Left, site == CanardSite::Saddle);
  const double lo = -1.0 + options.margin;
  const double hi = 1.0 - options.margin;
  const double dwell_min = options.dwell_threshold > 0.0 ? options.dwell_threshold : 1.0 / p.eps;

  CanardClass out;
  out.site = site;
  const double t0 = tr.t_begin();
  out.t_site = t0 + wrap_angle(eq.theta - wrap_angle(f.omega * t0)) / f.omega;
  if (out.t_site > tr.t_end())
    throw Error(ErrorKind::NoPassage, "trajectory does not reach the folded equilibrium phase");

  const LevelScanner sc(tr, options.scan_step);
  const std::size_t n = sc.size();
  const std::size_t is = sc.index_at(out.t_site);
  const double xs = tr.sample(out.t_site)[0];

  // Dwell from band entry to the first sample above the band.
  auto decide_jump = [&](std::size_t i_in, std::size_t i_up) {
    out.t_entry = i_in == 0 ? sc.t(0) : sc.refine(i_in, lo);
    out.t_exit = sc.refine(i_up, 1.0);
    const auto i_hi = sc.next(i_in, i_up + 1, hi, true);
    const double t_hi = i_hi ? sc.refine(*i_hi, hi) : out.t_exit;
    out.dwell = t_hi - out.t_entry;
    out.outcome = out.dwell > dwell_min ? CanardOutcome::JumpAcross : CanardOutcome::FoldJump;
  };

  const auto last_entry = sc.last(1, is + 1, lo, true);
  const std::size_t i_entry_before = last_entry.value_or(0);
  const bool spike_since_entry =
      sc.last(i_entry_before, is + 1, 1.0, true).has_value() ||
      sc.last(i_entry_before, is + 1, 1.0, false).has_value();

  if (xs >= 1.0 || (xs > lo && spike_since_entry)) {
    // Mid-spike at the site phase: judge the jump that produced this spike.
    const auto i_up = sc.last(1, is + 1, 1.0, true);
    if (!i_up) throw Error(ErrorKind::NoPassage, "spike onset precedes the trajectory window");
    const auto i_in = sc.last(1, *i_up + 1, lo, true);
    decide_jump(i_in.value_or(0), *i_up);
    return out;
  }

  std::size_t i_in = 0;
  if (xs > lo) {
    i_in = i_entry_before;
  } else {
    const auto next_in = sc.next(is + 1, n, lo, true);
    if (!next_in) throw Error(ErrorKind::NoPassage, "no repelling-branch entry after the site");
    i_in = *next_in;
  }

  for (std::size_t i = std::max<std::size_t>(i_in + 1, 1); i < n; ++i) {
    if (sc.falls(i, lo)) {
      out.outcome = CanardOutcome::JumpBack;
      out.t_entry = i_in == 0 ? sc.t(0) : sc.refine(i_in, lo);
      out.t_exit = sc.refine(i, lo);
      out.dwell = out.t_exit - out.t_entry;
      return out;
    }
    if (sc.rises(i, 1.0)) {
      decide_jump(i_in, i);
      return out;
    }
  }
  throw Error(ErrorKind::NoPassage, "no jump decided before the end of the window");
}

int spike_estimate_formula(double dtheta, double omega, double f_burst) {
  if (!(omega > 0.0)) throw Error(ErrorKind::DomainError, "omega must be positive");
  const double arg = std::max(0.0, dtheta) / (1000.0 * omega) * f_burst;
  return 1 + static_cast<int>(std::ceil(arg));
}

SpikeEstimate estimate_spike_count(const StandardRun& run, const ModelParams& p, const Forcing& f,
                                   double f_burst) {
  const auto& tr = run.trajectory;
  const double t_first_end = tr.t_begin() + run.period;
  std::optional<double> first_return;
  bool armed = false;
  for (const auto& e : tr.events) {
    if (e.label == kEventUp) {
      if (e.t >= t_first_end) break;
      armed = true;
    } else if (armed && e.label == kEventMin) {
      first_return = e.t;
      break;
    }
  }
  if (!first_return)
    throw Error(ErrorKind::NoFirstSpike, "no return to the lower branch after a first spike");

  const ManifoldExpansion ws = solve_expansion(ManifoldKind::Stable, p, f);
  const LowerBoundCrossing cross = theta_at_lower_bound(ws);

  SpikeEstimate out;
  out.theta_first = wrap_angle(f.omega * *first_return);
  out.theta_stable = cross.theta;
  out.dtheta = out.theta_stable - out.theta_first;
  out.estimate = spike_estimate_formula(out.dtheta, f.omega, f_burst);
  return out;
}

SpikeEstimate estimate_spike_count(const ModelParams& p, const Forcing& f, double f_burst,
                                   const ode::IntegratorConfig& config) {
  const StandardRun run = simulate_standard(p, f, config);
  return estimate_spike_count(run, p, f, f_burst);
}

BurstMetrics measure(const StandardRun& run, const Forcing& f) {
  BurstMetrics m;
  m.spike_count = count_spikes(run.trajectory, run.n_periods);
  m.l2 = l2_norm(run.trajectory, run.period);
  m.theta_seq = theta_sequence(run.trajectory, f);
  return m;
}

}  // namespace fhn
