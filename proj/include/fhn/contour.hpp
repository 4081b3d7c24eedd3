#pragma once

// Marching-squares isolines on a rectangular grid with optional holes, and a
// detector for cusp-like sharp turns of the extracted curves.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace fhn {

/// Scalar field on the tensor grid xs by ys, stored row-major with y as the
/// outer index: value(i, j) = values[j * xs.size() + i]. Cells whose valid
/// flag is 0 are holes.
struct ScalarGrid {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;

  std::size_t nx() const { return xs.size(); }
  std::size_t ny() const { return ys.size(); }
  double at(std::size_t i, std::size_t j) const { return values[j * nx() + i]; }
  bool ok(std::size_t i, std::size_t j) const { return valid.empty() || valid[j * nx() + i] != 0; }
};

using Point2 = std::array<double, 2>;

struct Polyline {
  double level = 0.0;
  bool closed = false;
  std::vector<Point2> points;        ///< (x, y) coordinates
  std::vector<Point2> index_points;  ///< fractional (i, j) grid indices
};

/// Isolines of one level. Squares touching a hole produce nothing. Segments
/// are joined into maximal polylines; closed loops repeat no point.
std::vector<Polyline> marching_squares(const ScalarGrid& grid, double level);

std::vector<Polyline> marching_squares(const ScalarGrid& grid, const std::vector<double>& levels);

/// Half-integer levels k + 1/2 between the smallest and largest valid value.
std::vector<double> half_integer_levels(const ScalarGrid& grid);

/// n evenly spaced interior levels between the valid min and max (none when
/// the field is constant or n = 0).
std::vector<double> even_levels(const ScalarGrid& grid, int n);

struct Cusp {
  std::size_t polyline = 0;
  std::size_t vertex = 0;
  Point2 point{};
  Point2 index_point{};
  double turn_deg = 0.0;
};

struct CuspOptions {
  /// Chord length, in grid cells, of the arms compared at each vertex.
  double arm = 1.5;
  /// Minimum turning angle between the incoming and outgoing arms.
  double min_turn_deg = 120.0;
};

/// Vertices where a polyline folds back on itself: the direction from the
/// point one arm back to the vertex and from the vertex to the point one arm
/// ahead differ by at least min_turn_deg. Arms are measured in index space so
/// the result does not depend on axis scaling. One cusp is reported per
/// run of consecutive qualifying vertices (the sharpest).
std::vector<Cusp> find_cusps(const std::vector<Polyline>& lines, const CuspOptions& options = {});

}  // namespace fhn
