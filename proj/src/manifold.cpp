#include "fhn/manifold.hpp"

#include "fhn/error.hpp"
#include "fhn/geometry.hpp"
#include "fhn/kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fhn {

namespace {

constexpr double kResidualTol = 1e-12;
constexpr int kMaxNewton = 100;
constexpr double kFdStep = 1e-7;
constexpr double kHalfPi = std::numbers::pi / 2.0;

double offset_of(const ManifoldExpansion& m, double theta) {
  const double th = std::remainder(theta - m.theta_base, kTwoPi);
  if (std::abs(th) > kHalfPi)
    throw Error(ErrorKind::OutOfValidity, "phase offset outside the series validity window");
  return th;
}

double horner(const SeriesCoeffs& a, double th) {
  double acc = a[4];
  for (int k = 3; k >= 0; --k) acc = acc * th + a[static_cast<std::size_t>(k)];
  return acc * th;
}

double horner_slope(const SeriesCoeffs& a, double th) {
  double acc = 5.0 * a[4];
  for (int k = 3; k >= 0; --k) acc = acc * th + (k + 1) * a[static_cast<std::size_t>(k)];
  return acc;
}

}  // namespace

std::string_view to_string(ManifoldKind kind) {
  return kind == ManifoldKind::Stable ? "stable" : "unstable";
}

SeriesCoeffs b_coefficients(const SeriesCoeffs& a, double delta, double r_delta, double mu,
                            const ModelParams& p) {
  const double a1 = a[0];
  const double a2 = a[1];
  const double a3 = a[2];
  const double a4 = a[3];
  const double a5 = a[4];
  if (a1 == 0.0) throw Error(ErrorKind::DivisionByZero, "a1 = 0 in b-coefficients");
  if (delta == 0.0) throw Error(ErrorKind::DivisionByZero, "delta = 0 in b-coefficients");
  const double b = p.b;
  const double c = std::sqrt(std::max(0.0, (r_delta - mu) * (r_delta + mu)));

  const double p2 = a1 * a1;
  const double p3 = p2 * a1;
  const double p4 = p3 * a1;
  const double p5 = p4 * a1;
  const double p6 = p5 * a1;
  const double p7 = p6 * a1;
  const double p8 = p7 * a1;
  const double p9 = p8 * a1;

  SeriesCoeffs out;
  out[0] = (a1 + c) / (2.0 * a1 * delta);
  out[1] = (-2.0 * p3 * b + p3 + p2 * c + a1 * mu - 2.0 * a2 * c) / (4.0 * p2 * delta);
  out[2] = (-2.0 * p5 * b + 3.0 * p5 + 3.0 * p4 * c - 12.0 * p3 * a2 * b + 6.0 * p3 * a2 +
            3.0 * p3 * mu - 2.0 * p2 * c - 6.0 * a1 * a2 * mu - 12.0 * a1 * a3 * c +
            12.0 * a2 * a2 * c) /
           (24.0 * p3 * delta);
  out[3] = (-2.0 * p7 * b + 3.0 * p7 + 3.0 * p6 * c - 8.0 * p5 * a2 * b + 12.0 * p5 * a2 +
            3.0 * p5 * mu + 6.0 * p4 * a2 * c - 24.0 * p4 * a3 * b + 12.0 * p4 * a3 -
            2.0 * p4 * c - p3 * mu + 4.0 * p2 * a2 * c - 12.0 * p2 * a3 * mu -
            24.0 * p2 * a4 * c + 12.0 * a1 * a2 * a2 * mu + 48.0 * a1 * a2 * a3 * c -
            24.0 * a2 * a2 * a2 * c) /
           (48.0 * p4 * delta);
  out[4] = (-10.0 * p9 * b + 15.0 * p9 + 15.0 * p8 * c - 60.0 * p7 * a2 * b + 90.0 * p7 * a2 +
            15.0 * p7 * mu + 60.0 * p6 * a2 * c - 80.0 * p6 * a3 * b + 120.0 * p6 * a3 -
            10.0 * p6 * c - 40.0 * p5 * a2 * a2 * b + 60.0 * p5 * a2 * a2 + 30.0 * p5 * a2 * mu +
            60.0 * p5 * a3 * c - 240.0 * p5 * a4 * b + 120.0 * p5 * a4 - 5.0 * p5 * mu +
            2.0 * p4 * c + 10.0 * p3 * a2 * mu + 40.0 * p3 * a3 * c - 120.0 * p3 * a4 * mu -
            240.0 * p3 * a5 * c - 40.0 * p2 * a2 * a2 * c + 240.0 * p2 * a2 * a3 * mu +
            480.0 * p2 * a2 * a4 * c + 240.0 * p2 * a3 * a3 * c - 120.0 * a1 * a2 * a2 * a2 * mu -
            720.0 * a1 * a2 * a2 * a3 * c + 240.0 * a2 * a2 * a2 * a2 * c) /
           (480.0 * p5 * delta);
  return out;
}

SeriesCoeffs expansion_residual(const SeriesCoeffs& a, double delta, double r_delta, double mu,
                                const ModelParams& p) {
  const SeriesCoeffs bk = b_coefficients(a, delta, r_delta, mu, p);
  SeriesCoeffs r;
  for (std::size_t k = 0; k < 5; ++k) r[k] = static_cast<double>(k + 1) * a[k] - bk[k];
  return r;
}

double a1_closed_form(double lambda, double delta) { return -lambda / (2.0 * delta); }

double a2_closed_form(double lambda, double delta, double c_const, double mu, double b) {
  const double l2 = lambda * lambda;
  return (l2 * lambda * (2.0 * b - 1.0) + 2.0 * delta * l2 * c_const -
          4.0 * mu * delta * delta * lambda) /
         (16.0 * delta * delta * (l2 + delta * c_const));
}

ManifoldExpansion solve_expansion(ManifoldKind branch, const ModelParams& p, const Forcing& f) {
  const auto eqs = folded_equilibria(p, f);
  const FoldedEquilibrium& saddle = find_equilibrium(eqs, FoldSide::Left, true);
  const auto d = derived_constants(p, f);
  const double delta = d.delta;
  const double lambda = branch == ManifoldKind::Stable ? saddle.eigenpairs[0].lambda.real()
                                                       : saddle.eigenpairs[1].lambda.real();

  ManifoldExpansion m;
  m.branch = branch;
  m.theta_base = saddle.theta;
  m.c_const = std::sqrt(std::max(0.0, (d.r_delta - d.mu) * (d.r_delta + d.mu)));

  using Vec5 = Eigen::Matrix<double, 5, 1>;
  using Mat5 = Eigen::Matrix<double, 5, 5>;
  auto residual = [&](const Vec5& x) {
    SeriesCoeffs a;
    for (int i = 0; i < 5; ++i) a[static_cast<std::size_t>(i)] = x[i];
    const SeriesCoeffs r = expansion_residual(a, delta, d.r_delta, d.mu, p);
    Vec5 out;
    for (int i = 0; i < 5; ++i) out[i] = r[static_cast<std::size_t>(i)];
    return out;
  };

  Vec5 x = Vec5::Zero();
  x[0] = a1_closed_form(lambda, delta);
  Vec5 r = residual(x);
  int it = 0;
  while (r.cwiseAbs().maxCoeff() > kResidualTol) {
    if (++it > kMaxNewton)
      throw Error(ErrorKind::NewtonDiverged, "series coefficients did not converge");
    Mat5 jac;
    for (int j = 0; j < 5; ++j) {
      Vec5 xp = x;
      const double h = kFdStep * std::max(1.0, std::abs(x[j]));
      xp[j] += h;
      jac.col(j) = (residual(xp) - r) / h;
    }
    const Vec5 step = jac.partialPivLu().solve(-r);
    if (!step.allFinite())
      throw Error(ErrorKind::NewtonDiverged, "singular Newton step for series coefficients");
    x += step;
    r = residual(x);
    if (!r.allFinite() || r.cwiseAbs().maxCoeff() > 1e12)
      throw Error(ErrorKind::NewtonDiverged, "series Newton iteration blew up");
  }
  for (int i = 0; i < 5; ++i) m.coeffs[static_cast<std::size_t>(i)] = x[i];
  m.residual = r.cwiseAbs().maxCoeff();
  m.iterations = it;
  return m;
}

double eval_manifold(const ManifoldExpansion& m, double theta) {
  return horner(m.coeffs, offset_of(m, theta));
}

double eval_manifold_slope(const ManifoldExpansion& m, double theta) {
  return horner_slope(m.coeffs, offset_of(m, theta));
}

void eval_manifold_offsets(const ManifoldExpansion& m, std::span<const double> th,
                           std::span<double> u) {
  for (double t : th)
    if (!(std::abs(t) <= kHalfPi))
      throw Error(ErrorKind::OutOfValidity, "phase offset outside the series validity window");
  const std::array<double, 6> poly{0.0,         m.coeffs[0], m.coeffs[1],
                                   m.coeffs[2], m.coeffs[3], m.coeffs[4]};
  kernels::poly_eval(poly, th, u);
}

LowerBoundCrossing theta_at_lower_bound(const ManifoldExpansion& m) {
  if (m.branch != ManifoldKind::Stable)
    throw Error(ErrorKind::DomainError, "lower-bound phase is defined for the stable branch");
  auto g = [&](double th) { return horner(m.coeffs, th) + 1.0; };

  // Scan backward from the saddle for the nearest sign change of u + 1.
  constexpr int kScan = 4096;
  double hi = 0.0;
  double g_hi = g(hi);
  double lo = 0.0;
  bool found = false;
  for (int i = 1; i <= kScan; ++i) {
    const double th = -kHalfPi * static_cast<double>(i) / kScan;
    const double gt = g(th);
    if (gt == 0.0 || (gt < 0.0) != (g_hi < 0.0)) {
      lo = th;
      found = true;
      break;
    }
    hi = th;
    g_hi = gt;
  }
  if (!found)
    throw Error(ErrorKind::NoIntersection, "stable series does not reach u = -1 within pi/2");

  // Bracket [lo, hi] with the sign change; bisect, then polish by Newton.
  for (int i = 0; i < 60 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((g(mid) < 0.0) == (g_hi < 0.0)) {
      hi = mid;
      g_hi = g(mid);
    } else {
      lo = mid;
    }
  }
  double th = 0.5 * (lo + hi);
  for (int i = 0; i < 5; ++i) {
    const double slope = horner_slope(m.coeffs, th);
    if (slope == 0.0) break;
    const double next = th - g(th) / slope;
    if (!(next >= lo - 1e-12 && next <= hi + 1e-12)) break;
    th = next;
  }
  LowerBoundCrossing out;
  out.theta_hat = th;
  out.theta = wrap_angle(m.theta_base + th);
  out.residual = std::abs(g(th));
  return out;
}

}  // namespace fhn
