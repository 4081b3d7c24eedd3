#pragma once

// Measurements on simulated bursting trajectories: the standard simulation
// protocol, spike counts, the period-normalized L2 norm, phases of returns to
// the lower bound x = -2, canard classification at the folded singularities
// and the phase-distance spike-count estimate.

#include "fhn/geometry.hpp"
#include "fhn/integrator.hpp"
#include "fhn/manifold.hpp"
#include "fhn/model.hpp"

#include <string_view>
#include <vector>

namespace fhn {

// Event labels attached by simulate_standard.
inline constexpr std::string_view kEventUp = "x_up";      // x = 1, rising
inline constexpr std::string_view kEventDown = "x_down";  // x = 1, falling
inline constexpr std::string_view kEventMin = "x_min";    // local minimum of x below -1.5

/// Below this level a local minimum of x counts as a return to the lower
/// branch after a spike.
inline constexpr double kReturnLevel = -1.5;

struct Protocol {
  int burn_in_periods = 2;
  int measure_periods = 2;
};

/// Equilibrium of the unforced system (E = 0): the real root of
/// x - x^3/3 - x/b - a = 0 with y = x/b.
StateXY unforced_equilibrium(const ModelParams& p);

struct StandardRun {
  ode::Trajectory<2> trajectory;  ///< measurement window only
  double period = 0.0;
  int n_periods = 0;
};

/// Integrates from the unforced equilibrium through the burn-in periods, then
/// records the measurement periods with x = 1 crossings and x minima as
/// events.
StandardRun simulate_standard(const ModelParams& p, const Forcing& f,
                              const ode::IntegratorConfig& config = {},
                              const Protocol& protocol = {});

/// floor(upward x = 1 crossings / n_periods).
int count_spikes(const ode::Trajectory<2>& tr, int n_periods);

/// sqrt of the time average of x^2 + y^2 over the trajectory span, by the
/// midpoint rule on samples_per_period uniform dense-output samples per
/// period T. The span must be a whole number of periods.
double l2_norm(const ode::Trajectory<2>& tr, double period, int samples_per_period = 20000);

struct ThetaSequence {
  std::vector<double> unwrapped;  ///< omega t at each return
  std::vector<double> wrapped;    ///< same, reduced to [0, 2 pi)
  std::vector<double> times;
};

/// Phases of the first x minimum below the return level after each upward
/// x = 1 crossing (one entry per spike whose return lies in the window).
ThetaSequence theta_sequence(const ode::Trajectory<2>& tr, const Forcing& f);

enum class CanardSite { Node, Saddle };
enum class CanardOutcome { JumpBack, JumpAcross, FoldJump };

std::string_view to_string(CanardSite site);
std::string_view to_string(CanardOutcome outcome);

struct CanardOptions {
  double margin = 0.05;
  /// Minimum repelling-branch dwell (in t) that marks a canard segment;
  /// non-positive means 1/eps.
  double dwell_threshold = 0.0;
  /// Sampling step of the dense output for level crossings.
  double scan_step = 0.01;
};

struct CanardClass {
  CanardSite site = CanardSite::Node;
  CanardOutcome outcome = CanardOutcome::JumpBack;
  double t_site = 0.0;   ///< first time in the window with theta = theta_site
  double t_entry = 0.0;  ///< entry into the repelling band
  double t_exit = 0.0;   ///< time of the deciding crossing
  double dwell = 0.0;    ///< time spent in the repelling band before exit
};

/// Classifies what the trajectory does after passing the left folded node or
/// saddle phase. Throws NoPassage if the phase is not reached, or if neither
/// outcome happens before the window ends.
CanardClass classify_canard(const ode::Trajectory<2>& tr,
                            const std::vector<FoldedEquilibrium>& equilibria, CanardSite site,
                            const ModelParams& p, const Forcing& f,
                            const CanardOptions& options = {});

inline constexpr double kDefaultBurstFrequency = 27.0;

/// 1 + ceil(max(0, dtheta) / (1000 omega) * f_burst).
int spike_estimate_formula(double dtheta, double omega, double f_burst = kDefaultBurstFrequency);

struct SpikeEstimate {
  int estimate = 0;
  double theta_first = 0.0;   ///< first return phase after a spike, wrapped
  double theta_stable = 0.0;  ///< stable-manifold phase at x = -2, wrapped
  double dtheta = 0.0;
};

/// Estimate from an existing standard run. Throws NoFirstSpike when the
/// first measurement period has no return after a spike, and propagates
/// NoSaddle, NewtonDiverged and NoIntersection from the series machinery.
SpikeEstimate estimate_spike_count(const StandardRun& run, const ModelParams& p,
                                   const Forcing& f,
                                   double f_burst = kDefaultBurstFrequency);

/// Runs the standard protocol, then estimates.
SpikeEstimate estimate_spike_count(const ModelParams& p, const Forcing& f,
                                   double f_burst = kDefaultBurstFrequency,
                                   const ode::IntegratorConfig& config = {});

struct BurstMetrics {
  int spike_count = 0;
  double l2 = 0.0;
  ThetaSequence theta_seq;
};

BurstMetrics measure(const StandardRun& run, const Forcing& f);

}  // namespace fhn
