#pragma once

// Local quintic series for the stable and unstable invariant manifolds of the
// left folded saddle of the desingularized flow, written as
//
//   u(th) = a1 th + a2 th^2 + a3 th^3 + a4 th^4 + a5 th^5,  th = theta - theta_S
//
// The coefficients solve (k+1) a_{k+1} = b_k(a), where b_k are the Taylor
// coefficients of du/dth = (R cos(theta - phi) - G(u)) / (delta u (u - 2)).

#include "fhn/model.hpp"

#include <array>
#include <span>
#include <string_view>

namespace fhn {

enum class ManifoldKind { Stable, Unstable };

std::string_view to_string(ManifoldKind kind);

using SeriesCoeffs = std::array<double, 5>;

struct ManifoldExpansion {
  ManifoldKind branch = ManifoldKind::Stable;
  double theta_base = 0.0;  ///< theta of the left folded saddle, in [0, 2 pi)
  SeriesCoeffs coeffs{};    ///< a1..a5
  double c_const = 0.0;     ///< sqrt(R^2 - mu^2)
  double residual = 0.0;    ///< max |(k+1) a_{k+1} - b_k|
  int iterations = 0;
};

/// Taylor coefficients b0..b4 of the direction field along the series.
/// Throws DivisionByZero if a1 = 0 or delta = 0.
SeriesCoeffs b_coefficients(const SeriesCoeffs& a, double delta, double r_delta, double mu,
                            const ModelParams& p);

/// Residuals (k+1) a_{k+1} - b_k for k = 0..4.
SeriesCoeffs expansion_residual(const SeriesCoeffs& a, double delta, double r_delta, double mu,
                                const ModelParams& p);

/// Closed forms: a1 = -lambda/(2 delta) and the a2 that solves the second
/// equation given that a1.
double a1_closed_form(double lambda, double delta);
double a2_closed_form(double lambda, double delta, double c_const, double mu, double b);

/// Newton solve of the five coefficient equations, started at
/// (-lambda/(2 delta), 0, 0, 0, 0). Throws NoSaddle if the left folded saddle
/// does not exist and NewtonDiverged if the residual does not reach 1e-12
/// within 100 iterations.
ManifoldExpansion solve_expansion(ManifoldKind branch, const ModelParams& p, const Forcing& f);

/// Series value at theta. Throws OutOfValidity if |theta - theta_base|,
/// reduced to (-pi, pi], exceeds pi/2.
double eval_manifold(const ManifoldExpansion& m, double theta);

/// Derivative du/dtheta of the series.
double eval_manifold_slope(const ManifoldExpansion& m, double theta);

/// Series values at offsets th (not reduced, each |th| <= pi/2).
void eval_manifold_offsets(const ManifoldExpansion& m, std::span<const double> th,
                           std::span<double> u);

struct LowerBoundCrossing {
  double theta = 0.0;      ///< in [0, 2 pi)
  double theta_hat = 0.0;  ///< offset from theta_base, negative
  double residual = 0.0;   ///< |u + 1| at the root
};

/// Phase where the stable series, followed backward from the saddle, reaches
/// u = -1 (x = -2). Throws NoIntersection if there is no such root with
/// -pi/2 <= th < 0, DomainError for an unstable expansion.
LowerBoundCrossing theta_at_lower_bound(const ManifoldExpansion& m);

}  // namespace fhn
