#pragma once

// Closed-form geometry of the singular limits: the sheets of the critical
// manifold, the folded equilibria of the desingularized reduced flow with
// their type and eigenstructure, the (omega, E) region map, the
// super-critical manifold of the slow layer and its delayed-Hopf points.

#include "fhn/model.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <string_view>
#include <utility>
#include <vector>

namespace fhn {

enum class ManifoldBranch { AttractingMinus, FoldMinus, Repelling, FoldPlus, AttractingPlus };

std::string_view to_string(ManifoldBranch branch);

/// Sheet of the critical manifold v = F(u) containing u. Fold labels are
/// returned only within 1e-12 of u = 0 or u = 2.
ManifoldBranch classify_manifold_point(double u);

/// Amplitude thresholds at phase speed delta. The starred values are the
/// existence thresholds of the folded equilibria on each fold; the
/// double-starred values separate folded nodes from folded foci.
struct FoldThresholds {
  double e_star_left = 0.0;
  double e_star_right = 0.0;
  double e_2star_left = 0.0;
  double e_2star_right = 0.0;
};

/// delta >= 0. At delta = 0 the node/focus thresholds are +infinity.
FoldThresholds fold_thresholds(const ModelParams& p, double delta);

/// Phase speed delta at which the left node/focus threshold meets the right
/// existence threshold (e_2star_left = e_star_right), by bisection.
double threshold_intersection_delta(const ModelParams& p);

enum class FoldSide { Left, Right };
enum class EquilibriumKind { Saddle, Node, Focus };

std::string_view to_string(FoldSide side);
std::string_view to_string(EquilibriumKind kind);

struct Eigenpair {
  std::complex<double> lambda;
  Eigen::Vector2cd vector;
};

/// Equilibrium of the desingularized flow on a fold line. Eigenpairs are
/// ordered as (lambda_1, lambda_2): for saddles lambda_1 < 0 < lambda_2, for
/// nodes lambda_1 < lambda_2 < 0, for foci the positive-imaginary member first.
struct FoldedEquilibrium {
  FoldSide side = FoldSide::Left;
  EquilibriumKind kind = EquilibriumKind::Saddle;
  double u = 0.0;
  double v = 0.0;
  double theta = 0.0;  ///< in [0, 2 pi)
  std::array<Eigenpair, 2> eigenpairs;
  Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();
};

/// Folded equilibria in the order left saddle, left node, right saddle,
/// right node (absent ones skipped). Throws SaddleNodeBoundary within 1e-10
/// of an existence threshold.
std::vector<FoldedEquilibrium> folded_equilibria(const ModelParams& p, const Forcing& f);

/// Finds one equilibrium by side and kind class (node also matches focus).
/// Throws NoSaddle when the requested saddle is absent and DomainError for an
/// absent node.
const FoldedEquilibrium& find_equilibrium(const std::vector<FoldedEquilibrium>& eqs,
                                          FoldSide side, bool saddle);

enum class Region { I, II, III, IV, V, VI, Boundary };

std::string_view to_string(Region region);

/// Region of the (omega, E) plane from comparisons against the thresholds.
/// Within 1e-10 of any threshold the result is Region::Boundary.
Region classify_region(const ModelParams& p, const Forcing& f);

/// Number of folded equilibria implied by a region (-1 for Boundary).
int equilibrium_count(Region region);

struct SmallDeltaEigenvalues {
  double saddle_1 = 0.0;
  double saddle_2 = 0.0;
  double node_1 = 0.0;
  double node_2 = 0.0;
  double lambda_cap = 0.0;  ///< 2 (E^2 b^2 - mu^2)
};

/// Second-order small-delta expansions of the left-fold eigenvalues.
/// Throws DomainError unless E^2 b^2 > mu^2.
SmallDeltaEigenvalues eigen_smalldelta_expansion(const ModelParams& p, double E, double delta);

struct SupercriticalPoint {
  double u = 0.0;
  double v = 0.0;
  int iterations = 0;
};

/// Point of the super-critical manifold on the plane theta = theta0: the
/// unique root of G(u) = E b sin(theta0), with v = F(u).
SupercriticalPoint supercritical_manifold_point(double theta0, const ModelParams& p, double E);

/// Points on the critical manifold where the slow-layer Jacobian has zero
/// trace, u = 1 -+ sqrt(1 - eps b). Throws DomainError if eps b >= 1.
std::pair<double, double> delayed_hopf_points(const ModelParams& p);

}  // namespace fhn
