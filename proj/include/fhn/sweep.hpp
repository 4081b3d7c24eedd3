#pragma once

// Parallel (omega, E) parameter sweeps of the burst pipeline with a
// resumable checkpoint log and a deterministic CSV result.

#include "fhn/burst.hpp"
#include "fhn/contour.hpp"
#include "fhn/geometry.hpp"
#include "fhn/integrator.hpp"
#include "fhn/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fhn {

/// Uniform axis lo, lo + step, ..., up to hi (inclusive within 1e-9 steps).
struct AxisRange {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;

  /// Axis with n points from lo to hi inclusive.
  static AxisRange with_count(double lo, double hi, int n);
  std::size_t size() const;
  std::vector<double> values() const;
  void validate(const char* name) const;
};

enum class Metric : unsigned { SpikeCount = 1, L2 = 2, EstCount = 4, Region = 8 };

struct SweepSpec {
  AxisRange omega;
  AxisRange e;
  unsigned metrics = 0xF;  ///< bit set of Metric
  int workers = 1;
  ModelParams params;
  ode::IntegratorConfig integrator;
  double f_burst = kDefaultBurstFrequency;
  /// Cells between checkpoint flushes.
  std::size_t checkpoint_every = 256;

  bool wants(Metric m) const { return (metrics & static_cast<unsigned>(m)) != 0; }
  void validate() const;
  std::size_t cell_count() const { return omega.size() * e.size(); }
  /// Canonical text of everything that determines cell values (not workers).
  std::string canonical() const;
  std::uint64_t hash() const;
};

/// Reads `key = value` lines ('#' starts a comment). Keys: omega_min,
/// omega_max, omega_step | omega_points, E_min, E_max, E_step | E_points,
/// metrics, workers, a, b, eps, rel_tol, abs_tol, f_burst, checkpoint_every.
SweepSpec parse_sweep_spec(const std::string& text);
SweepSpec load_sweep_spec(const std::filesystem::path& path);
/// Applies one key/value pair; throws ConfigError for unknown keys.
void apply_spec_key(SweepSpec& spec, const std::string& key, const std::string& value);

struct CellRecord {
  double omega = 0.0;
  double e = 0.0;
  std::string status = "pending";  ///< "ok" or an error kind name
  int spike_count = -1;
  double l2 = 0.0;
  /// Estimated count; 0 when the run has no first spike, -1 when the
  /// estimator does not apply or failed. Empty when not requested.
  std::optional<int> est_count;
  std::string region;  ///< empty when not requested
  bool done = false;

  bool ok() const { return status == "ok"; }
  bool operator==(const CellRecord&) const = default;
};

/// The full per-cell pipeline: simulate, measure, classify, estimate.
CellRecord run_cell(const SweepSpec& spec, double omega, double e);

struct SweepGrid {
  std::vector<double> omegas;
  std::vector<double> es;
  std::vector<CellRecord> cells;  ///< row-major, E outer, omega inner
  std::uint64_t spec_hash = 0;

  std::size_t index(std::size_t i_omega, std::size_t j_e) const {
    return j_e * omegas.size() + i_omega;
  }
  const CellRecord& at(std::size_t i_omega, std::size_t j_e) const {
    return cells[index(i_omega, j_e)];
  }
  bool complete() const;
  std::size_t pending() const;
};

struct SweepOptions {
  std::optional<std::filesystem::path> checkpoint;
  /// Final CSV, written only once the grid is complete. The checkpoint log
  /// is removed after the CSV is in place.
  std::optional<std::filesystem::path> output;
  /// Stop (as if killed) after this many newly computed cells; for tests.
  std::optional<std::size_t> stop_after;
};

/// Runs every pending cell in row-major batches of checkpoint_every cells,
/// each batch split into contiguous chunks across the workers. With a
/// checkpoint path, previously logged cells are reused (a log written for a
/// different spec is rejected with ConfigError) and each finished batch is
/// appended and flushed.
SweepGrid run_sweep(const SweepSpec& spec, const SweepOptions& options = {});

inline constexpr const char* kGridHeader = "omega,E,status,spike_count,l2,est_count,region";

std::string grid_csv(const SweepGrid& grid);
/// Writes via a temporary file and rename.
void write_grid_csv(const SweepGrid& grid, const std::filesystem::path& path);
SweepGrid read_grid_csv(const std::filesystem::path& path);
SweepGrid parse_grid_csv(const std::string& text);

/// Scalar field of one metric; non-ok cells are holes.
ScalarGrid metric_field(const SweepGrid& grid, Metric metric);

/// Spike-count boundaries at half-integer levels. Throws IncompleteGrid.
std::vector<Polyline> extract_boundaries(const SweepGrid& grid);

/// L2 level sets at n evenly spaced levels. Throws IncompleteGrid.
std::vector<Polyline> l2_levelsets(const SweepGrid& grid, int n_levels = 24);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace fhn
