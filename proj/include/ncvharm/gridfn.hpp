#pragma once

#include <optional>
#include <vector>

#include "ncvharm/grid.hpp"
#include "ncvharm/matalg.hpp"

namespace ncvharm {

// Piecewise-constant matrix-valued function: value i on [left(i), right(i)), zero outside.
// Values share a shape rows x cols; `dim()` is the column count (the right factor size).
class GridFn {
 public:
  GridFn() = default;
  GridFn(const Grid& grid, Eigen::Index rows, Eigen::Index cols);
  GridFn(const Grid& grid, Eigen::Index n) : GridFn(grid, n, n) {}
  GridFn(const Grid& grid, std::vector<Mat> values);

  const Grid& grid() const { return grid_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  Eigen::Index dim() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  const Mat& operator[](std::size_t i) const { return values_[i]; }
  Mat& operator[](std::size_t i) { return values_[i]; }
  const std::vector<Mat>& values() const { return values_; }

  // Value at x (zero outside the window).
  Mat at(double x) const;

  GridFn adjoint() const;
  bool is_zero() const;

  GridFn& operator+=(const GridFn& other);
  GridFn& operator-=(const GridFn& other);
  GridFn& operator*=(cplx s);

 private:
  Grid grid_;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<Mat> values_;
};

GridFn operator+(GridFn x, const GridFn& y);
GridFn operator-(GridFn x, const GridFn& y);
GridFn operator*(cplx s, GridFn x);

// Constant value c on the cells of `grid`.
GridFn constant_fn(const Grid& grid, const Mat& c);

// Copy onto a larger grid of the same lattice; cells not covered are zero.
GridFn embed(const GridFn& f, const Grid& target);
// Restriction of the cell values to a sub-grid of the same lattice (cells outside f are zero).
GridFn crop(const GridFn& f, const Grid& target);
// Sum of functions living on possibly different grids of one lattice, on their hull.
GridFn add_on_hull(const GridFn& x, const GridFn& y);
// Cell-average projection of chi_I * f (partial cells scaled by their covered fraction).
GridFn restrict_to(const GridFn& f, const Interval& iv);

// Covered fraction of cell i by the interval, in [0, 1].
double cell_fraction(const Grid& g, std::size_t i, const Interval& iv);

Mat integrate(const GridFn& f, const std::optional<Interval>& iv = std::nullopt);
Mat interval_mean(const GridFn& f, const Interval& iv);

double weighted_l2_norm(const GridFn& f, Weight w = Weight::unit);
// Integrated Gram matrix  int w(t) f(t)* f(t) dt.
Mat column_gram(const GridFn& f, Weight w = Weight::unit);
double column_norm(const GridFn& f, double p, Weight w = Weight::unit);
double row_norm(const GridFn& f, double p, Weight w = Weight::unit);
// (int w(t) ||f(t)||_p^2 dt)^{1/2}: pointwise Schatten norm, then weighted L2.
double pointwise_schatten_l2(const GridFn& f, double p, Weight w = Weight::unit);
// L1(L1) norm: int ||f(t)||_{S_1} dt, optionally over an interval (fractional cells).
double l1_norm(const GridFn& f, const std::optional<Interval>& iv = std::nullopt);

GridFn right_multiply(const GridFn& f, const Mat& h);
GridFn left_multiply(const Mat& m, const GridFn& f);

// Cellwise max over the hull of S_inf norms of the difference.
double max_cell_diff(const GridFn& x, const GridFn& y);

// Exact int tau(x(t) y(t)) dt for functions on one lattice (shapes must chain).
cplx trace_pairing(const GridFn& x, const GridFn& y);

}  // namespace ncvharm
