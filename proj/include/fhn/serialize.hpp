#pragma once

// JSON and CSV renderings of the toolkit's result types.

#include "fhn/burst.hpp"
#include "fhn/contour.hpp"
#include "fhn/error.hpp"
#include "fhn/geometry.hpp"
#include "fhn/integrator.hpp"
#include "fhn/manifold.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace fhn {

/// printf %.17g, which round-trips every double.
std::string format_double(double v);

nlohmann::json to_json(const FoldThresholds& th);
nlohmann::json to_json(const FoldedEquilibrium& eq);
nlohmann::json to_json(const std::vector<FoldedEquilibrium>& eqs);
nlohmann::json to_json(const ManifoldExpansion& m);
nlohmann::json to_json(const BurstMetrics& m);
nlohmann::json to_json(const CanardClass& c);
nlohmann::json to_json(const SpikeEstimate& e);
nlohmann::json to_json(const Cusp& c);

/// Array of polylines, each an array of [x, y] pairs.
nlohmann::json polylines_json(const std::vector<Polyline>& lines);

nlohmann::json error_json(const Error& e);

/// Knot values as `t,x,y,theta` rows with theta wrapped.
std::string trajectory_csv(const ode::Trajectory<2>& tr, const Forcing& f);

inline constexpr const char* kMetricsHeader = "omega,E,spike_count,l2,n_theta,est_count";

/// One metrics row (no newline); est_count < 0 is written empty.
std::string metrics_csv_row(const Forcing& f, const BurstMetrics& m, int est_count);

}  // namespace fhn
