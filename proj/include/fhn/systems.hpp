#pragma once

// Adapters exposing the model vector fields to the integrator.

#include "fhn/integrator.hpp"
#include "fhn/model.hpp"

namespace fhn {

/// Planar non-autonomous system in (x, y).
struct ForcedSystem {
  static constexpr int dim = 2;
  ModelParams params;
  Forcing forcing;

  ode::Vec<2> rhs(double t, const ode::Vec<2>& y) const {
    return rhs_forced({y[0], y[1], t}, params, forcing);
  }
  ode::Mat<2> jacobian(double t, const ode::Vec<2>& y) const {
    return jacobian_forced({y[0], y[1], t}, params, forcing);
  }
  ode::Vec<2> time_derivative(double t, const ode::Vec<2>& y) const {
    return time_derivative_forced({y[0], y[1], t}, params, forcing);
  }
};

/// Autonomous system in (u, v, theta) with theta left unwrapped.
struct AutonomousSystem {
  static constexpr int dim = 3;
  ModelParams params;
  Forcing forcing;

  ode::Vec<3> rhs(double, const ode::Vec<3>& y) const {
    return rhs_autonomous(y, params, forcing);
  }
  ode::Mat<3> jacobian(double, const ode::Vec<3>& y) const {
    return jacobian_autonomous(y, params, forcing);
  }
  ode::Vec<3> time_derivative(double, const ode::Vec<3>&) const { return ode::Vec<3>::Zero(); }
};

}  // namespace fhn
