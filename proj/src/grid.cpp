#include "ncvharm/grid.hpp"

#include <algorithm>
#include <cmath>

#include "ncvharm/error.hpp"

namespace ncvharm {

namespace {
constexpr double kAlignTol = 1e-12;
}

Interval::Interval(double lo, double hi) : a(lo), b(hi) {
  if (!(hi > lo)) throw Error("degenerate interval");
}

Interval Interval::dilate(double factor) const {
  const double half = 0.5 * factor * length();
  return {center() - half, center() + half};
}

std::optional<Interval> intersect(const Interval& x, const Interval& y) {
  const double lo = std::max(x.a, y.a), hi = std::min(x.b, y.b);
  if (!(hi > lo)) return std::nullopt;
  return Interval{lo, hi};
}

Grid::Grid(double o, double h, std::size_t n) : origin(o), cell_width(h), num_cells(n) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error("cell width must be positive");
  if (n == 0) throw Error("grid needs at least one cell");
  if (!std::isfinite(o)) throw Error("non-finite grid origin");
}

bool Grid::on_lattice(double x) const {
  const double c = cell_coord(x);
  return std::abs(c - std::round(c)) <= kAlignTol * std::max(1.0, std::abs(c)) ;
}

long long Grid::lattice_index(double x) const { return std::llround(cell_coord(x)); }

Grid Grid::sub(long long first, long long last) const {
  if (last <= first) throw Error("empty sub-grid");
  return {origin + static_cast<double>(first) * cell_width, cell_width,
          static_cast<std::size_t>(last - first)};
}

Grid Grid::cover(const Interval& iv) const {
  const double ca = cell_coord(iv.a), cb = cell_coord(iv.b);
  long long first = static_cast<long long>(std::floor(ca));
  long long last = static_cast<long long>(std::ceil(cb));
  if (on_lattice(iv.a)) first = std::llround(ca);
  if (on_lattice(iv.b)) last = std::llround(cb);
  return sub(first, last);
}

Grid Grid::widen(std::size_t l, std::size_t r) const {
  return {origin - static_cast<double>(l) * cell_width, cell_width, num_cells + l + r};
}

bool Grid::same_lattice(const Grid& other) const {
  if (std::abs(other.cell_width - cell_width) > kAlignTol * cell_width) return false;
  return on_lattice(other.origin);
}

bool Grid::operator==(const Grid& other) const {
  return origin == other.origin && cell_width == other.cell_width && num_cells == other.num_cells;
}

Grid hull(const Grid& x, const Grid& y) {
  if (!x.same_lattice(y)) throw Error("grids are not on a common lattice");
  const long long y0 = x.lattice_index(y.origin);
  const long long first = std::min<long long>(0, y0);
  const long long last = std::max<long long>(static_cast<long long>(x.num_cells),
                                              y0 + static_cast<long long>(y.num_cells));
  return x.sub(first, last);
}

double weight_integral(Weight w, double a, double b) {
  switch (w) {
    case Weight::unit:
      return b - a;
    case Weight::poisson_up:
      return (b - a) + (b * b * b - a * a * a) / 3.0;
    case Weight::poisson_down:
      return std::atan(b) - std::atan(a);
  }
  return 0.0;
}

}  // namespace ncvharm
