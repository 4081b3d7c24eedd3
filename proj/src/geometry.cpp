#include "fhn/geometry.hpp"

#include "fhn/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <limits>

namespace fhn {

namespace {

constexpr double kFoldTol = 1e-12;
constexpr double kBoundaryTol = 1e-10;

FoldedEquilibrium make_equilibrium(FoldSide side, double u, double theta, const ModelParams& p,
                                   const Forcing& f) {
  FoldedEquilibrium eq;
  eq.side = side;
  eq.u = u;
  eq.v = cubic_F(u);
  eq.theta = wrap_angle(theta);
  eq.jacobian = jacobian_desingularized(eq.u, eq.theta, p, f);
  const Eigen::Matrix2d& j = eq.jacobian;

  // The lower-right entry vanishes, so det = -J01 J10 and V = (lambda, J10)
  // satisfies the second row identically.
  const double tr = j(0, 0);
  const double det = -j(0, 1) * j(1, 0);
  const double disc = tr * tr - 4.0 * det;
  std::complex<double> l1;
  std::complex<double> l2;
  if (det < 0.0) {
    eq.kind = EquilibriumKind::Saddle;
  } else if (disc >= 0.0) {
    eq.kind = EquilibriumKind::Node;
  } else {
    eq.kind = EquilibriumKind::Focus;
  }
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    const double r1 = 0.5 * (tr - s);
    // Product form avoids cancellation in the small root.
    const double r2 = r1 != 0.0 ? det / r1 : 0.5 * (tr + s);
    l1 = r1;
    l2 = r2;
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    l1 = {0.5 * tr, im};
    l2 = {0.5 * tr, -im};
  }
  for (int k = 0; k < 2; ++k) {
    const std::complex<double> lam = k == 0 ? l1 : l2;
    Eigen::Vector2cd vec;
    vec << lam, std::complex<double>(j(1, 0), 0.0);
    eq.eigenpairs[static_cast<std::size_t>(k)] = {lam, vec};
  }
  return eq;
}

}  // namespace

std::string_view to_string(ManifoldBranch branch) {
  switch (branch) {
    case ManifoldBranch::AttractingMinus: return "attracting_minus";
    case ManifoldBranch::FoldMinus: return "fold_minus";
    case ManifoldBranch::Repelling: return "repelling";
    case ManifoldBranch::FoldPlus: return "fold_plus";
    case ManifoldBranch::AttractingPlus: return "attracting_plus";
  }
  return "unknown";
}

ManifoldBranch classify_manifold_point(double u) {
  if (std::abs(u) <= kFoldTol) return ManifoldBranch::FoldMinus;
  if (std::abs(u - 2.0) <= kFoldTol) return ManifoldBranch::FoldPlus;
  if (u < 0.0) return ManifoldBranch::AttractingMinus;
  if (u < 2.0) return ManifoldBranch::Repelling;
  return ManifoldBranch::AttractingPlus;
}

FoldThresholds fold_thresholds(const ModelParams& p, double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw Error(ErrorKind::DomainError, "delta must be finite and >= 0");
  const double norm = std::hypot(p.b, delta);
  FoldThresholds th;
  th.e_star_left = std::abs(cubic_G(0.0, p)) / norm;
  th.e_star_right = std::abs(cubic_G(2.0, p)) / norm;
  if (delta == 0.0) {
    th.e_2star_left = std::numeric_limits<double>::infinity();
    th.e_2star_right = std::numeric_limits<double>::infinity();
  } else {
    // Node/focus switch where 8 delta sqrt(R^2 - G^2) = 1.
    const double extra = 1.0 / (8.0 * delta * norm);
    th.e_2star_left = std::hypot(th.e_star_left, extra);
    th.e_2star_right = std::hypot(th.e_star_right, extra);
  }
  return th;
}

double threshold_intersection_delta(const ModelParams& p) {
  p.validate();
  auto h = [&](double delta) {
    const auto th = fold_thresholds(p, delta);
    return th.e_2star_left - th.e_star_right;
  };
  // h is +inf at 0 and tends to e_star_left - e_star_right < 0.
  double lo = 1e-6;
  double hi = 1.0;
  while (h(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw Error(ErrorKind::NoIntersection, "threshold curves do not cross");
  }
  if (h(lo) < 0.0) throw Error(ErrorKind::NoIntersection, "threshold curves do not cross");
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::string_view to_string(FoldSide side) { return side == FoldSide::Left ? "left" : "right"; }

std::string_view to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::Saddle: return "saddle";
    case EquilibriumKind::Node: return "node";
    case EquilibriumKind::Focus: return "focus";
  }
  return "unknown";
}

std::vector<FoldedEquilibrium> folded_equilibria(const ModelParams& p, const Forcing& f) {
  p.validate();
  f.validate(p);
  const auto d = derived_constants(p, f);
  std::vector<FoldedEquilibrium> out;
  const double r = d.r_delta;
  for (const auto side : {FoldSide::Left, FoldSide::Right}) {
    const double u = side == FoldSide::Left ? 0.0 : 2.0;
    const double g = cubic_G(u, p);
    if (r == 0.0) continue;
    const double ratio = std::abs(g) / r;
    if (std::abs(ratio - 1.0) <= kBoundaryTol)
      throw Error(ErrorKind::SaddleNodeBoundary,
                  std::string("degenerate folded saddle-node on the ") +
                      std::string(to_string(side)) + " fold");
    if (ratio > 1.0) continue;
    const double ac = std::acos(g / r);
    // On the left fold the saddle sits at phi + arccos, on the right fold at
    // phi - arccos; the node takes the other sign.
    const double sign = side == FoldSide::Left ? 1.0 : -1.0;
    out.push_back(make_equilibrium(side, u, d.phi_delta + sign * ac, p, f));
    out.push_back(make_equilibrium(side, u, d.phi_delta - sign * ac, p, f));
  }
  return out;
}

const FoldedEquilibrium& find_equilibrium(const std::vector<FoldedEquilibrium>& eqs,
                                          FoldSide side, bool saddle) {
  for (const auto& eq : eqs) {
    if (eq.side != side) continue;
    if ((eq.kind == EquilibriumKind::Saddle) == saddle) return eq;
  }
  if (saddle) throw Error(ErrorKind::NoSaddle, "no folded saddle on the requested fold");
  throw Error(ErrorKind::DomainError, "no folded node or focus on the requested fold");
}

std::string_view to_string(Region region) {
  switch (region) {
    case Region::I: return "I";
    case Region::II: return "II";
    case Region::III: return "III";
    case Region::IV: return "IV";
    case Region::V: return "V";
    case Region::VI: return "VI";
    case Region::Boundary: return "boundary";
  }
  return "unknown";
}

Region classify_region(const ModelParams& p, const Forcing& f) {
  p.validate();
  f.validate(p);
  const auto th = fold_thresholds(p, f.delta(p));
  const double e = f.E;
  for (double t : {th.e_star_left, th.e_star_right, th.e_2star_left, th.e_2star_right})
    if (std::isfinite(t) && std::abs(e - t) <= kBoundaryTol) return Region::Boundary;
  if (e < th.e_star_left) return Region::I;
  if (e < th.e_star_right) return e < th.e_2star_left ? Region::II : Region::III;
  if (e < th.e_2star_left && e < th.e_2star_right) return Region::IV;
  if (e < th.e_2star_right) return Region::V;
  return Region::VI;
}

int equilibrium_count(Region region) {
  switch (region) {
    case Region::I: return 0;
    case Region::II:
    case Region::III: return 2;
    case Region::IV:
    case Region::V:
    case Region::VI: return 4;
    case Region::Boundary: return -1;
  }
  return -1;
}

SmallDeltaEigenvalues eigen_smalldelta_expansion(const ModelParams& p, double E, double delta) {
  const double mu = mu_of(p);
  const double eb = E * p.b;
  if (!(eb * eb > mu * mu))
    throw Error(ErrorKind::DomainError, "small-delta expansion needs E^2 b^2 > mu^2");
  SmallDeltaEigenvalues out;
  const double lc = 2.0 * (eb * eb - mu * mu);
  const double l1 = lc * delta;
  const double l2 = 2.0 * lc * lc * delta * delta;
  out.lambda_cap = lc;
  out.saddle_1 = -1.0 - l1 + l2;
  out.saddle_2 = l1 - l2;
  out.node_1 = -1.0 + l1 + l2;
  out.node_2 = -l1 - l2;
  return out;
}

SupercriticalPoint supercritical_manifold_point(double theta0, const ModelParams& p, double E) {
  p.validate();
  if (!std::isfinite(theta0) || !std::isfinite(E))
    throw Error(ErrorKind::DomainError, "theta0 and E must be finite");
  const double target = E * p.b * std::sin(theta0);
  auto h = [&](double u) { return cubic_G(u, p) - target; };

  double lo = -1.0;
  double hi = 1.0;
  while (h(lo) > 0.0) lo *= 2.0;
  while (h(hi) < 0.0) hi *= 2.0;

  SupercriticalPoint out;
  double u = std::clamp(0.0, lo, hi);
  for (int it = 1; it <= 200; ++it) {
    out.iterations = it;
    const double hu = h(u);
    if (hu == 0.0) break;
    if (hu < 0.0) lo = u; else hi = u;
    double next = u - hu / cubic_G_prime(u, p);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - u);
    u = next;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(u))) break;
  }
  out.u = u;
  out.v = cubic_F(u);
  return out;
}

std::pair<double, double> delayed_hopf_points(const ModelParams& p) {
  const double eb = p.eps * p.b;
  if (!(eb < 1.0)) throw Error(ErrorKind::DomainError, "delayed-Hopf points need eps b < 1");
  const double s = std::sqrt(1.0 - eb);
  return {1.0 - s, 1.0 + s};
}

}  // namespace fhn
