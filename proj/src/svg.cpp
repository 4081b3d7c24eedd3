#include "fhn/svg.hpp"

#include "fhn/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace fhn {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 56.0;

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const {
    return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin);
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string header() {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + ' ' + num(kHeight) +
         "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string axes(const Frame& fr, const std::string& xlabel, const std::string& ylabel) {
  std::string s;
  s += "<rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) + "\" width=\"" +
       num(kWidth - 2 * kMargin) + "\" height=\"" + num(kHeight - 2 * kMargin) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  char buf[64];
  for (int k = 0; k <= 4; ++k) {
    const double xv = fr.x0 + (fr.x1 - fr.x0) * k / 4.0;
    const double yv = fr.y0 + (fr.y1 - fr.y0) * k / 4.0;
    std::snprintf(buf, sizeof buf, "%.4g", xv);
    s += "<text x=\"" + num(fr.px(xv)) + "\" y=\"" + num(kHeight - kMargin + 16) +
         "\" font-size=\"11\" text-anchor=\"middle\">" + buf + "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", yv);
    s += "<text x=\"" + num(kMargin - 6) + "\" y=\"" + num(fr.py(yv) + 4) +
         "\" font-size=\"11\" text-anchor=\"end\">" + buf + "</text>\n";
  }
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 12) +
       "\" font-size=\"13\" text-anchor=\"middle\">" + xlabel + "</text>\n";
  s += "<text x=\"16\" y=\"" + num(kHeight / 2) + "\" font-size=\"13\" transform=\"rotate(-90 16 " +
       num(kHeight / 2) + ")\" text-anchor=\"middle\">" + ylabel + "</text>\n";
  return s;
}

std::string polyline(const Frame& fr, const std::vector<Point2>& pts, bool closed,
                     const std::string& style) {
  std::string d;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    d += k == 0 ? "M" : "L";
    d += num(fr.px(pts[k][0])) + ',' + num(fr.py(pts[k][1]));
  }
  if (closed) d += "Z";
  return "<path d=\"" + d + "\" " + style + "/>\n";
}

}  // namespace

std::string trajectory_svg(const ode::Trajectory<2>& tr, const Forcing& f,
                           const std::vector<FoldedEquilibrium>& equilibria) {
  const Frame fr{0.0, kTwoPi, -2.5, 2.5};
  std::string s = header() + axes(fr, "theta (rad)", "x");
  for (double level : {-2.0, -1.0, 1.0}) {
    s += "<line x1=\"" + num(fr.px(0)) + "\" x2=\"" + num(fr.px(kTwoPi)) + "\" y1=\"" +
         num(fr.py(level)) + "\" y2=\"" + num(fr.py(level)) +
         "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (const auto& eq : equilibria) {
    const char* colour = eq.kind == EquilibriumKind::Saddle ? "#c0392b" : "#2471a3";
    s += "<line x1=\"" + num(fr.px(eq.theta)) + "\" x2=\"" + num(fr.px(eq.theta)) + "\" y1=\"" +
         num(fr.py(2.5)) + "\" y2=\"" + num(fr.py(-2.5)) + "\" stroke=\"" + colour +
         "\" stroke-dasharray=\"2 2\"/>\n";
  }
  std::vector<Point2> piece;
  double prev_theta = -1.0;
  auto flush = [&] {
    if (piece.size() > 1) s += polyline(fr, piece, false, "fill=\"none\" stroke=\"black\" stroke-width=\"1\"");
    piece.clear();
  };
  const double t0 = tr.t_begin();
  const double t1 = tr.t_end();
  const std::size_t n = 4000;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = k == n ? t1 : t0 + (t1 - t0) * static_cast<double>(k) / n;
    const double th = wrap_angle(f.omega * t);
    if (th < prev_theta) flush();
    piece.push_back({th, std::clamp(tr.sample(t)[0], -2.5, 2.5)});
    prev_theta = th;
  }
  flush();
  return s + "</svg>\n";
}

std::string diagram_svg(const SweepGrid& grid, const std::vector<Polyline>& boundaries,
                        const std::vector<Polyline>& levelsets) {
  const auto& xs = grid.omegas;
  const auto& ys = grid.es;
  auto half = [](const std::vector<double>& v) { return v.size() > 1 ? 0.5 * (v[1] - v[0]) : 0.5; };
  const double hx = half(xs);
  const double hy = half(ys);
  const Frame fr{xs.front() - hx, xs.back() + hx, ys.front() - hy, ys.back() + hy};
  std::string s = header();

  int max_count = 1;
  for (const auto& c : grid.cells)
    if (c.ok()) max_count = std::max(max_count, c.spike_count);
  for (std::size_t j = 0; j < ys.size(); ++j) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto& c = grid.at(i, j);
      std::string fill = "#f4c7c3";
      if (c.ok()) {
        const int g = 245 - static_cast<int>(185.0 * c.spike_count / max_count);
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", g, g, g);
        fill = buf;
      }
      const double x0 = fr.px(xs[i] - hx);
      const double x1 = fr.px(xs[i] + hx);
      const double y0 = fr.py(ys[j] + hy);
      const double y1 = fr.py(ys[j] - hy);
      s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(x1 - x0) +
           "\" height=\"" + num(y1 - y0) + "\" fill=\"" + fill + "\"/>\n";
    }
  }
  for (const auto& pl : levelsets)
    s += polyline(fr, pl.points, pl.closed, "fill=\"none\" stroke=\"#2e86c1\" stroke-width=\"0.7\"");
  for (const auto& pl : boundaries)
    s += polyline(fr, pl.points, pl.closed, "fill=\"none\" stroke=\"black\" stroke-width=\"1.6\"");
  s += axes(fr, "omega", "E");
  return s + "</svg>\n";
}

}  // namespace fhn
