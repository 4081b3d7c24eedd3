#include "fhn/model.hpp"

#include "fhn/error.hpp"

#include <cmath>
#include <string>

namespace fhn {

void ModelParams::validate() const {
  if (!(a > 0.0) || !std::isfinite(a))
    throw Error(ErrorKind::DomainError, "model parameter a must be positive");
  if (!(b > 0.0 && b < 1.0))
    throw Error(ErrorKind::DomainError, "model parameter b must lie in (0, 1)");
  if (!(eps > 0.0 && eps < 1.0))
    throw Error(ErrorKind::DomainError, "model parameter eps must lie in (0, 1)");
}

void Forcing::validate(const ModelParams& p) const {
  if (!(E >= 0.0) || !std::isfinite(E))
    throw Error(ErrorKind::DomainError, "forcing amplitude E must be finite and >= 0");
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw Error(ErrorKind::DomainError, "forcing frequency omega must be finite and > 0");
  if (!std::isfinite(delta(p)))
    throw Error(ErrorKind::DomainError, "omega / eps is not finite");
}

double mu_of(const ModelParams& p) { return p.b * (p.a + 2.0 / 3.0) - 1.0; }

DerivedConstants derived_constants(const ModelParams& p, const Forcing& f) {
  DerivedConstants d;
  d.delta = f.delta(p);
  d.mu = mu_of(p);
  d.r_delta = f.E * std::hypot(p.b, d.delta);
  // sin(phi) = b / r, cos(phi) = delta / r with both positive.
  d.phi_delta = std::atan2(p.b, d.delta);
  return d;
}

double cubic_F(double u) { return u * u - u * u * u / 3.0; }

double cubic_F_prime(double u) { return u * (2.0 - u); }

double cubic_G(double u, const ModelParams& p) { return mu_of(p) + u - p.b * cubic_F(u); }

double cubic_G_prime(double u, const ModelParams& p) { return 1.0 + p.b * u * (u - 2.0); }

double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative number plus 2 pi can round up to 2 pi.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

StateUVTheta to_shifted(const StateXY& s, const ModelParams& p, const Forcing& f) {
  const double phase = f.omega * s.t;
  StateUVTheta out;
  out.u = s.x - kKneeX;
  out.v = (s.y + p.a - f.E * std::sin(phase)) - kKneeY;
  out.theta = wrap_angle(phase);
  return out;
}

StateXY from_shifted(const StateUVTheta& s, const ModelParams& p, const Forcing& f,
                     long period_index) {
  StateXY out;
  out.x = s.u + kKneeX;
  out.y = s.v + kKneeY - p.a + f.E * std::sin(s.theta);
  out.t = (s.theta + kTwoPi * static_cast<double>(period_index)) / f.omega;
  return out;
}

Eigen::Vector2d rhs_forced(const StateXY& s, const ModelParams& p, const Forcing& f) {
  const double x = s.x;
  return {x - x * x * x / 3.0 - s.y - p.a + f.E * std::sin(f.omega * s.t),
          p.eps * (x - p.b * s.y)};
}

Eigen::Matrix2d jacobian_forced(const StateXY& s, const ModelParams& p, const Forcing&) {
  Eigen::Matrix2d j;
  j << 1.0 - s.x * s.x, -1.0,
       p.eps, -p.eps * p.b;
  return j;
}

Eigen::Vector2d time_derivative_forced(const StateXY& s, const ModelParams&,
                                       const Forcing& f) {
  return {f.E * f.omega * std::cos(f.omega * s.t), 0.0};
}

Eigen::Vector3d rhs_autonomous(const Eigen::Vector3d& uvt, const ModelParams& p,
                               const Forcing& f) {
  const auto d = derived_constants(p, f);
  const double u = uvt[0];
  const double v = uvt[1];
  const double theta = uvt[2];
  return {-v + cubic_F(u),
          p.eps * (u - p.b * v + d.mu - d.r_delta * std::cos(theta - d.phi_delta)),
          p.eps * d.delta};
}

Eigen::Matrix3d jacobian_autonomous(const Eigen::Vector3d& uvt, const ModelParams& p,
                                    const Forcing& f) {
  const auto d = derived_constants(p, f);
  Eigen::Matrix3d j;
  j << cubic_F_prime(uvt[0]), -1.0, 0.0,
       p.eps, -p.eps * p.b, p.eps * d.r_delta * std::sin(uvt[2] - d.phi_delta),
       0.0, 0.0, 0.0;
  return j;
}

Eigen::Vector2d rhs_desingularized(double u, double theta, const ModelParams& p,
                                   const Forcing& f) {
  const auto d = derived_constants(p, f);
  return {d.r_delta * std::cos(theta - d.phi_delta) - cubic_G(u, p),
          d.delta * u * (u - 2.0)};
}

Eigen::Matrix2d jacobian_desingularized(double u, double theta, const ModelParams& p,
                                        const Forcing& f) {
  const auto d = derived_constants(p, f);
  Eigen::Matrix2d j;
  j << -cubic_G_prime(u, p), -d.r_delta * std::sin(theta - d.phi_delta),
       2.0 * d.delta * (u - 1.0), 0.0;
  return j;
}

Eigen::Vector2d rhs_slow_layer(double u, double v, const ModelParams& p, double E,
                               double theta0) {
  return {(-v + cubic_F(u)) / p.eps,
          u - p.b * v + mu_of(p) - E * p.b * std::sin(theta0)};
}

Eigen::Matrix2d jacobian_slow_layer(double u, const ModelParams& p) {
  Eigen::Matrix2d j;
  j << cubic_F_prime(u) / p.eps, -1.0 / p.eps,
       1.0, -p.b;
  return j;
}

}  // namespace fhn
