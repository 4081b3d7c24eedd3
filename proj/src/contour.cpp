#include "fhn/contour.hpp"

#include "fhn/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <utility>

namespace fhn {

namespace {

using EdgeId = std::size_t;
using Segment = std::pair<EdgeId, EdgeId>;

struct EdgePoint {
  Point2 xy;
  Point2 ij;
};

class Tracer {
 public:
  Tracer(const ScalarGrid& g, double level) : g_(g), level_(level) {}

  std::vector<Polyline> run() {
    collect();
    return join();
  }

 private:
  EdgeId h_edge(std::size_t i, std::size_t j) const { return 2 * (j * g_.nx() + i); }
  EdgeId v_edge(std::size_t i, std::size_t j) const { return 2 * (j * g_.nx() + i) + 1; }

  void add_point(EdgeId id, std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1) {
    if (points_.count(id)) return;
    const double a = g_.at(i0, j0);
    const double b = g_.at(i1, j1);
    const double t = (level_ - a) / (b - a);
    const double fi = static_cast<double>(i0) + t * static_cast<double>(i1 - i0);
    const double fj = static_cast<double>(j0) + t * static_cast<double>(j1 - j0);
    const double x = g_.xs[i0] + t * (g_.xs[i1] - g_.xs[i0]);
    const double y = g_.ys[j0] + t * (g_.ys[j1] - g_.ys[j0]);
    points_[id] = {{x, y}, {fi, fj}};
  }

  void collect() {
    const std::size_t nx = g_.nx();
    const std::size_t ny = g_.ny();
    if (nx < 2 || ny < 2) return;
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      for (std::size_t i = 0; i + 1 < nx; ++i) {
        if (!(g_.ok(i, j) && g_.ok(i + 1, j) && g_.ok(i + 1, j + 1) && g_.ok(i, j + 1))) continue;
        const double v0 = g_.at(i, j);
        const double v1 = g_.at(i + 1, j);
        const double v2 = g_.at(i + 1, j + 1);
        const double v3 = g_.at(i, j + 1);
        const int c = (v0 > level_ ? 1 : 0) | (v1 > level_ ? 2 : 0) | (v2 > level_ ? 4 : 0) |
                      (v3 > level_ ? 8 : 0);
        if (c == 0 || c == 15) continue;
        // Edges: bottom, right, top, left.
        const EdgeId e[4] = {h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)};
        const bool in[4] = {(c & 1) != 0, (c & 2) != 0, (c & 4) != 0, (c & 8) != 0};
        if (in[0] != in[1]) add_point(e[0], i, j, i + 1, j);
        if (in[1] != in[2]) add_point(e[1], i + 1, j, i + 1, j + 1);
        if (in[3] != in[2]) add_point(e[2], i, j + 1, i + 1, j + 1);
        if (in[0] != in[3]) add_point(e[3], i, j, i, j + 1);
        if (c == 5 || c == 10) {
          const bool centre_in = 0.25 * (v0 + v1 + v2 + v3) > level_;
          // Cut off the corners that the centre does not join.
          const bool cut_odd = (c == 5) == centre_in;
          if (cut_odd) {
            segments_.push_back({e[0], e[1]});
            segments_.push_back({e[2], e[3]});
          } else {
            segments_.push_back({e[3], e[0]});
            segments_.push_back({e[1], e[2]});
          }
          continue;
        }
        EdgeId ends[2];
        int k = 0;
        if (in[0] != in[1]) ends[k++] = e[0];
        if (in[1] != in[2]) ends[k++] = e[1];
        if (in[3] != in[2]) ends[k++] = e[2];
        if (in[0] != in[3]) ends[k++] = e[3];
        segments_.push_back({ends[0], ends[1]});
      }
    }
  }

  std::vector<Polyline> join() {
    std::map<EdgeId, std::vector<std::size_t>> adj;
    for (std::size_t s = 0; s < segments_.size(); ++s) {
      adj[segments_[s].first].push_back(s);
      adj[segments_[s].second].push_back(s);
    }
    std::vector<bool> used(segments_.size(), false);
    std::vector<Polyline> out;

    auto walk = [&](EdgeId start, std::size_t seg) {
      Polyline pl;
      pl.level = level_;
      EdgeId cur = start;
      auto push = [&](EdgeId id) {
        pl.points.push_back(points_.at(id).xy);
        pl.index_points.push_back(points_.at(id).ij);
      };
      push(cur);
      while (true) {
        used[seg] = true;
        const EdgeId next = segments_[seg].first == cur ? segments_[seg].second : segments_[seg].first;
        if (next == start) {
          pl.closed = true;
          break;
        }
        push(next);
        cur = next;
        std::size_t following = segments_.size();
        for (std::size_t s : adj[cur])
          if (!used[s]) following = s;
        if (following == segments_.size()) break;
        seg = following;
      }
      out.push_back(std::move(pl));
    };

    for (const auto& [edge, segs] : adj)
      if (segs.size() == 1 && !used[segs[0]]) walk(edge, segs[0]);
    for (std::size_t s = 0; s < segments_.size(); ++s)
      if (!used[s]) walk(segments_[s].first, s);
    return out;
  }

  const ScalarGrid& g_;
  double level_;
  std::map<EdgeId, EdgePoint> points_;
  std::vector<Segment> segments_;
};

std::pair<double, double> valid_range(const ScalarGrid& g) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t j = 0; j < g.ny(); ++j)
    for (std::size_t i = 0; i < g.nx(); ++i)
      if (g.ok(i, j) && std::isfinite(g.at(i, j))) {
        lo = std::min(lo, g.at(i, j));
        hi = std::max(hi, g.at(i, j));
      }
  return {lo, hi};
}

void check_shape(const ScalarGrid& g) {
  if (g.values.size() != g.nx() * g.ny() || (!g.valid.empty() && g.valid.size() != g.values.size()))
    throw Error(ErrorKind::DomainError, "grid values do not match the axes");
}

// Point at arc length s along the polyline (index space); wraps when closed.
std::optional<Point2> at_arc(const std::vector<Point2>& p, const std::vector<double>& cum,
                             bool closed, double s) {
  const double total = cum.back();
  if (closed) {
    s = std::fmod(s, total);
    if (s < 0.0) s += total;
  } else if (s < 0.0 || s > total) {
    return std::nullopt;
  }
  auto it = std::upper_bound(cum.begin(), cum.end(), s);
  std::size_t k = static_cast<std::size_t>(it - cum.begin());
  if (k == 0) k = 1;
  if (k >= cum.size()) k = cum.size() - 1;
  const double len = cum[k] - cum[k - 1];
  const double t = len > 0.0 ? (s - cum[k - 1]) / len : 0.0;
  const Point2& a = p[k - 1];
  const Point2& b = p[k % p.size()];
  return Point2{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
}

}  // namespace

std::vector<Polyline> marching_squares(const ScalarGrid& grid, double level) {
  check_shape(grid);
  return Tracer(grid, level).run();
}

std::vector<Polyline> marching_squares(const ScalarGrid& grid, const std::vector<double>& levels) {
  std::vector<Polyline> out;
  for (double level : levels) {
    auto lines = marching_squares(grid, level);
    std::move(lines.begin(), lines.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<double> half_integer_levels(const ScalarGrid& grid) {
  check_shape(grid);
  const auto [lo, hi] = valid_range(grid);
  std::vector<double> levels;
  if (!(lo < hi)) return levels;
  for (double k = std::floor(lo); k + 0.5 < hi; k += 1.0)
    if (k + 0.5 > lo) levels.push_back(k + 0.5);
  return levels;
}

std::vector<double> even_levels(const ScalarGrid& grid, int n) {
  check_shape(grid);
  std::vector<double> levels;
  if (n <= 0) return levels;
  const auto [lo, hi] = valid_range(grid);
  if (!(lo < hi)) return levels;
  for (int k = 1; k <= n; ++k) levels.push_back(lo + (hi - lo) * k / (n + 1));
  return levels;
}

std::vector<Cusp> find_cusps(const std::vector<Polyline>& lines, const CuspOptions& options) {
  std::vector<Cusp> out;
  const double cos_max = std::cos(options.min_turn_deg * std::numbers::pi / 180.0);
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const auto& pts = lines[l].index_points;
    const bool closed = lines[l].closed;
    if (pts.size() < 3) continue;
    std::vector<Point2> path = pts;
    if (closed) path.push_back(pts.front());
    std::vector<double> cum(path.size(), 0.0);
    for (std::size_t k = 1; k < path.size(); ++k)
      cum[k] = cum[k - 1] + std::hypot(path[k][0] - path[k - 1][0], path[k][1] - path[k - 1][1]);
    if (cum.back() <= 2.0 * options.arm && !closed) continue;

    std::optional<Cusp> best;
    auto flush = [&] {
      if (best) out.push_back(*best);
      best.reset();
    };
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const auto back = at_arc(path, cum, closed, cum[k] - options.arm);
      const auto fwd = at_arc(path, cum, closed, cum[k] + options.arm);
      bool sharp = false;
      double turn = 0.0;
      if (back && fwd) {
        const double ax = pts[k][0] - (*back)[0];
        const double ay = pts[k][1] - (*back)[1];
        const double bx = (*fwd)[0] - pts[k][0];
        const double by = (*fwd)[1] - pts[k][1];
        const double na = std::hypot(ax, ay);
        const double nb = std::hypot(bx, by);
        if (na > 0.0 && nb > 0.0) {
          const double c = std::clamp((ax * bx + ay * by) / (na * nb), -1.0, 1.0);
          turn = std::acos(c) * 180.0 / std::numbers::pi;
          sharp = c <= cos_max;
        }
      }
      if (sharp) {
        if (!best || turn > best->turn_deg) best = Cusp{l, k, lines[l].points[k], pts[k], turn};
      } else {
        flush();
      }
    }
    flush();
  }
  return out;
}

}  // namespace fhn
