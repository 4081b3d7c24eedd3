#pragma once

// Parameters, coordinate changes and vector fields of the periodically
// forced FitzHugh-Nagumo model
//
//   dx/dt = x - x^3/3 - y - a + E sin(omega t)
//   dy/dt = eps (x - b y)
//
// and of its autonomous, desingularized and slow-layer reductions in the
// shifted coordinates (u, v, theta) that put the left knee at the origin.
// Everything here is a pure function of value-type inputs.

#include "fhn/error.hpp"

#include <Eigen/Dense>

#include <numbers>

namespace fhn {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Intrinsic FHN constants. Defaults are the values studied throughout.
struct ModelParams {
  double a = 0.875;
  double b = 0.8;
  double eps = 0.08;

  /// Throws DomainError unless a > 0, 0 < b < 1, 0 < eps < 1.
  void validate() const;
};

/// Periodic input E sin(omega t).
struct Forcing {
  double E = 0.0;
  double omega = 0.01;

  /// Phase speed on the slow timescale, omega = eps * delta.
  double delta(const ModelParams& p) const { return omega / p.eps; }
  double period() const { return kTwoPi / omega; }

  /// Throws DomainError unless E >= 0 and omega > 0 (and delta finite).
  void validate(const ModelParams& p) const;
};

struct DerivedConstants {
  double mu = 0.0;         ///< b(a + 2/3) - 1
  double r_delta = 0.0;    ///< E sqrt(b^2 + delta^2)
  double phi_delta = 0.0;  ///< phase offset in (0, pi/2)
  double delta = 0.0;
};

DerivedConstants derived_constants(const ModelParams& p, const Forcing& f);

/// mu depends on (a, b) only.
double mu_of(const ModelParams& p);

// Cubic nullcline in shifted coordinates and the reduced-flow function G.
double cubic_F(double u);
double cubic_F_prime(double u);
double cubic_G(double u, const ModelParams& p);
double cubic_G_prime(double u, const ModelParams& p);

struct StateXY {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

struct StateUVTheta {
  double u = 0.0;
  double v = 0.0;
  double theta = 0.0;  ///< wrapped to [0, 2 pi) at this boundary
};

/// Left knee of the x-nullcline Y = x - x^3/3.
inline constexpr double kKneeX = -1.0;
inline constexpr double kKneeY = -2.0 / 3.0;

/// Wrap an angle into [0, 2 pi).
double wrap_angle(double theta);

StateUVTheta to_shifted(const StateXY& s, const ModelParams& p, const Forcing& f);

/// Inverse of to_shifted. The time is reconstructed as
/// (theta + 2 pi * period_index) / omega.
StateXY from_shifted(const StateUVTheta& s, const ModelParams& p, const Forcing& f,
                     long period_index = 0);

// Non-autonomous planar system in (x, y).
Eigen::Vector2d rhs_forced(const StateXY& s, const ModelParams& p, const Forcing& f);
Eigen::Matrix2d jacobian_forced(const StateXY& s, const ModelParams& p, const Forcing& f);
/// Partial derivative of rhs_forced with respect to explicit time.
Eigen::Vector2d time_derivative_forced(const StateXY& s, const ModelParams& p,
                                       const Forcing& f);

// Autonomous three-dimensional system in (u, v, theta). Theta is taken as
// given (unwrapped values are fine).
Eigen::Vector3d rhs_autonomous(const Eigen::Vector3d& uvt, const ModelParams& p,
                               const Forcing& f);
Eigen::Matrix3d jacobian_autonomous(const Eigen::Vector3d& uvt, const ModelParams& p,
                                    const Forcing& f);

/// Desingularized reduced flow: (du/dtau_D, dtheta/dtau_D).
Eigen::Vector2d rhs_desingularized(double u, double theta, const ModelParams& p,
                                   const Forcing& f);
Eigen::Matrix2d jacobian_desingularized(double u, double theta, const ModelParams& p,
                                        const Forcing& f);

/// Slow-layer problem on the plane theta = theta0 (delta -> 0 limit), in the
/// slow time tau_1. Returns (du/dtau_1, dv/dtau_1).
Eigen::Vector2d rhs_slow_layer(double u, double v, const ModelParams& p, double E,
                               double theta0);
Eigen::Matrix2d jacobian_slow_layer(double u, const ModelParams& p);

}  // namespace fhn
