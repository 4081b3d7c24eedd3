#pragma once

// Static SVG figures: a trajectory projected on the (theta, x) plane and the
// (omega, E) spike-count diagram with contour overlays.

#include "fhn/contour.hpp"
#include "fhn/geometry.hpp"
#include "fhn/integrator.hpp"
#include "fhn/sweep.hpp"

#include <string>
#include <vector>

namespace fhn {

/// x against wrapped theta, one path piece per input period. Vertical
/// markers at the phases of the given folded equilibria.
std::string trajectory_svg(const ode::Trajectory<2>& tr, const Forcing& f,
                           const std::vector<FoldedEquilibrium>& equilibria = {});

/// Cells shaded by spike count (hatched grey for failed cells), spike-count
/// boundaries in black and L2 level sets in thin blue.
std::string diagram_svg(const SweepGrid& grid, const std::vector<Polyline>& boundaries,
                        const std::vector<Polyline>& levelsets = {});

}  // namespace fhn
