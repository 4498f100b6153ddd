#pragma once

#include <cstddef>
#include <optional>

namespace ncvharm {

struct Interval {
  double a = 0.0;
  double b = 0.0;

  Interval() = default;
  Interval(double lo, double hi);

  double length() const { return b - a; }
  double center() const { return 0.5 * (a + b); }
  // Concentric interval scaled by `factor`.
  Interval dilate(double factor) const;
  bool contains(const Interval& other) const { return a <= other.a && other.b <= b; }
};

// Intersection of two intervals, or nullopt when it has empty interior.
std::optional<Interval> intersect(const Interval& x, const Interval& y);

struct Grid {
  double origin = 0.0;
  double cell_width = 1.0;
  std::size_t num_cells = 1;

  Grid() = default;
  Grid(double origin, double cell_width, std::size_t num_cells);

  double left(std::size_t i) const { return origin + static_cast<double>(i) * cell_width; }
  double right(std::size_t i) const { return left(i + 1); }
  double mid(std::size_t i) const { return origin + (static_cast<double>(i) + 0.5) * cell_width; }
  double end() const { return left(num_cells); }
  Interval window() const { return {origin, end()}; }

  // Position of x in cell units relative to the origin.
  double cell_coord(double x) const { return (x - origin) / cell_width; }
  // True when x lies on a cell boundary within 1e-12 cell widths (any integer index).
  bool on_lattice(double x) const;
  bool aligned(const Interval& iv) const { return on_lattice(iv.a) && on_lattice(iv.b); }
  // Nearest lattice index to x (may be negative or beyond num_cells).
  long long lattice_index(double x) const;

  // Grid on the same lattice spanning lattice indices [first, last).
  Grid sub(long long first, long long last) const;
  // Smallest same-lattice grid covering the interval.
  Grid cover(const Interval& iv) const;
  // Same lattice, widened by `left_cells` and `right_cells`.
  Grid widen(std::size_t left_cells, std::size_t right_cells) const;

  bool same_lattice(const Grid& other) const;
  bool operator==(const Grid& other) const;
};

// Smallest grid on the common lattice covering both inputs.
Grid hull(const Grid& x, const Grid& y);

enum class Weight { unit, poisson_up, poisson_down };

// Exact integral of the weight over [a, b].
double weight_integral(Weight w, double a, double b);

}  // namespace ncvharm
