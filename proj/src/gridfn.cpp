#include "ncvharm/gridfn.hpp"

#include <algorithm>
#include <cmath>

#include "ncvharm/error.hpp"

namespace ncvharm {

GridFn::GridFn(const Grid& grid, Eigen::Index rows, Eigen::Index cols)
    : grid_(grid), rows_(rows), cols_(cols), values_(grid.num_cells, Mat::Zero(rows, cols)) {
  if (rows <= 0 || cols <= 0) throw Error("matrix dimension must be positive");
}

GridFn::GridFn(const Grid& grid, std::vector<Mat> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid.num_cells) throw Error("value count does not match grid");
  rows_ = values_.front().rows();
  cols_ = values_.front().cols();
  if (rows_ <= 0 || cols_ <= 0) throw Error("matrix dimension must be positive");
  for (const auto& v : values_) {
    if (v.rows() != rows_ || v.cols() != cols_) throw Error("dim mismatch between cells");
    if (!all_finite(v)) throw Error("non-finite matrix entry");
  }
}

Mat GridFn::at(double x) const {
  const double c = grid_.cell_coord(x);
  if (c < 0.0 || c >= static_cast<double>(size())) return Mat::Zero(rows_, cols_);
  return values_[static_cast<std::size_t>(c)];
}

GridFn GridFn::adjoint() const {
  GridFn out(grid_, cols_, rows_);
  for (std::size_t i = 0; i < size(); ++i) out.values_[i] = values_[i].adjoint();
  return out;
}

bool GridFn::is_zero() const {
  for (const auto& v : values_)
    if (!v.isZero(0.0)) return false;
  return true;
}

GridFn& GridFn::operator+=(const GridFn& other) {
  if (!(other.grid_ == grid_) || other.rows_ != rows_ || other.cols_ != cols_)
    throw Error("grid or dim mismatch");
  for (std::size_t i = 0; i < size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridFn& GridFn::operator-=(const GridFn& other) {
  if (!(other.grid_ == grid_) || other.rows_ != rows_ || other.cols_ != cols_)
    throw Error("grid or dim mismatch");
  for (std::size_t i = 0; i < size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridFn& GridFn::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

GridFn operator+(GridFn x, const GridFn& y) { return x += y; }
GridFn operator-(GridFn x, const GridFn& y) { return x -= y; }
GridFn operator*(cplx s, GridFn x) { return x *= s; }

GridFn constant_fn(const Grid& grid, const Mat& c) {
  return GridFn(grid, std::vector<Mat>(grid.num_cells, c));
}

GridFn embed(const GridFn& f, const Grid& target) {
  if (!target.same_lattice(f.grid())) throw Error("grids are not on a common lattice");
  const long long off = target.lattice_index(f.grid().origin);
  if (off < 0 || off + static_cast<long long>(f.size()) > static_cast<long long>(target.num_cells))
    throw Error("target grid does not contain the function window");
  GridFn out(target, f.rows(), f.cols());
  for (std::size_t i = 0; i < f.size(); ++i) out[static_cast<std::size_t>(off) + i] = f[i];
  return out;
}

GridFn crop(const GridFn& f, const Grid& target) {
  if (!target.same_lattice(f.grid())) throw Error("grids are not on a common lattice");
  const long long off = f.grid().lattice_index(target.origin);
  GridFn out(target, f.rows(), f.cols());
  for (std::size_t i = 0; i < target.num_cells; ++i) {
    const long long src = off + static_cast<long long>(i);
    if (src >= 0 && src < static_cast<long long>(f.size())) out[i] = f[static_cast<std::size_t>(src)];
  }
  return out;
}

GridFn add_on_hull(const GridFn& x, const GridFn& y) {
  const Grid g = hull(x.grid(), y.grid());
  return embed(x, g) + embed(y, g);
}

double cell_fraction(const Grid& g, std::size_t i, const Interval& iv) {
  const double lo = std::max(g.left(i), iv.a), hi = std::min(g.right(i), iv.b);
  if (!(hi > lo)) return 0.0;
  if (lo == g.left(i) && hi == g.right(i)) return 1.0;
  return (hi - lo) / g.cell_width;
}

namespace {

// Index range of cells meeting the interval, clipped to the grid.
std::pair<std::size_t, std::size_t> cell_range(const Grid& g, const Interval& iv) {
  const double ca = g.cell_coord(iv.a), cb = g.cell_coord(iv.b);
  const double n = static_cast<double>(g.num_cells);
  const double lo = std::clamp(std::floor(ca), 0.0, n);
  const double hi = std::clamp(std::ceil(cb), 0.0, n);
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

// Fraction with lattice snapping so that aligned endpoints give exact 0/1.
double snapped_fraction(const Grid& g, std::size_t i, const Interval& iv) {
  double ca = g.cell_coord(iv.a), cb = g.cell_coord(iv.b);
  if (g.on_lattice(iv.a)) ca = std::round(ca);
  if (g.on_lattice(iv.b)) cb = std::round(cb);
  const double lo = std::max(static_cast<double>(i), ca);
  const double hi = std::min(static_cast<double>(i + 1), cb);
  if (!(hi > lo)) return 0.0;
  return hi - lo;
}

}  // namespace

GridFn restrict_to(const GridFn& f, const Interval& iv) {
  GridFn out(f.grid(), f.rows(), f.cols());
  auto [lo, hi] = cell_range(f.grid(), iv);
  for (std::size_t i = lo; i < hi; ++i) {
    const double fr = snapped_fraction(f.grid(), i, iv);
    if (fr == 1.0)
      out[i] = f[i];
    else if (fr > 0.0)
      out[i] = fr * f[i];
  }
  return out;
}

Mat integrate(const GridFn& f, const std::optional<Interval>& iv) {
  const Grid& g = f.grid();
  Mat acc = Mat::Zero(f.rows(), f.cols());
  if (!iv) {
    for (std::size_t i = 0; i < f.size(); ++i) acc += f[i];
    return g.cell_width * acc;
  }
  auto [lo, hi] = cell_range(g, *iv);
  for (std::size_t i = lo; i < hi; ++i) {
    const double fr = snapped_fraction(g, i, *iv);
    if (fr == 1.0)
      acc += f[i];
    else if (fr > 0.0)
      acc += fr * f[i];
  }
  return g.cell_width * acc;
}

Mat interval_mean(const GridFn& f, const Interval& iv) {
  if (!(iv.length() > 0.0)) throw Error("degenerate interval");
  const Grid& g = f.grid();
  if (!g.window().contains(iv)) return integrate(f, iv) / iv.length();
  // Averaging deviations from one cell value keeps the mean of a constant exact.
  auto [lo, hi] = cell_range(g, iv);
  Mat acc = Mat::Zero(f.rows(), f.cols());
  std::optional<std::size_t> ref;
  for (std::size_t i = lo; i < hi; ++i) {
    const double fr = snapped_fraction(g, i, iv);
    if (fr <= 0.0) continue;
    if (!ref) ref = i;
    acc += fr * (f[i] - f[*ref]);
  }
  if (!ref) return acc;
  return f[*ref] + (g.cell_width / iv.length()) * acc;
}

double weighted_l2_norm(const GridFn& f, Weight w) {
  const Grid& g = f.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    acc += weight_integral(w, g.left(i), g.right(i)) * f[i].squaredNorm();
  return std::sqrt(acc);
}

Mat column_gram(const GridFn& f, Weight w) {
  const Grid& g = f.grid();
  Mat q = Mat::Zero(f.cols(), f.cols());
  for (std::size_t i = 0; i < f.size(); ++i)
    q.noalias() += weight_integral(w, g.left(i), g.right(i)) * (f[i].adjoint() * f[i]);
  return 0.5 * (q + q.adjoint());
}

double column_norm(const GridFn& f, double p, Weight w) {
  if (!(p >= 1.0)) throw Error("schatten exponent must be >= 1");
  return schatten_norm(sqrt_psd(column_gram(f, w)), p);
}

double row_norm(const GridFn& f, double p, Weight w) { return column_norm(f.adjoint(), p, w); }

double pointwise_schatten_l2(const GridFn& f, double p, Weight w) {
  const Grid& g = f.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double s = schatten_norm(f[i], p);
    acc += weight_integral(w, g.left(i), g.right(i)) * s * s;
  }
  return std::sqrt(acc);
}

double l1_norm(const GridFn& f, const std::optional<Interval>& iv) {
  const Grid& g = f.grid();
  double acc = 0.0;
  std::size_t lo = 0, hi = f.size();
  if (iv) std::tie(lo, hi) = cell_range(g, *iv);
  for (std::size_t i = lo; i < hi; ++i) {
    const double fr = iv ? snapped_fraction(g, i, *iv) : 1.0;
    if (fr > 0.0) acc += fr * schatten_norm(f[i], 1.0);
  }
  return g.cell_width * acc;
}

GridFn right_multiply(const GridFn& f, const Mat& h) {
  if (h.rows() != f.cols()) throw Error("dim mismatch");
  std::vector<Mat> vals(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) vals[i] = f[i] * h;
  return GridFn(f.grid(), std::move(vals));
}

GridFn left_multiply(const Mat& m, const GridFn& f) {
  if (m.cols() != f.rows()) throw Error("dim mismatch");
  std::vector<Mat> vals(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) vals[i] = m * f[i];
  return GridFn(f.grid(), std::move(vals));
}

double max_cell_diff(const GridFn& x, const GridFn& y) {
  const Grid g = hull(x.grid(), y.grid());
  const GridFn d = embed(x, g) - embed(y, g);
  double m = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) m = std::max(m, d[i].cwiseAbs().maxCoeff());
  return m;
}

cplx trace_pairing(const GridFn& x, const GridFn& y) {
  if (x.cols() != y.rows() || x.rows() != y.cols()) throw Error("dim mismatch");
  if (!x.grid().same_lattice(y.grid())) throw Error("grids are not on a common lattice");
  const long long off = x.grid().lattice_index(y.grid().origin);
  cplx acc = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const long long i = off + static_cast<long long>(j);
    if (i < 0 || i >= static_cast<long long>(x.size())) continue;
    const Mat& a = x[static_cast<std::size_t>(i)];
    const Mat& b = y[j];
    acc += a.transpose().cwiseProduct(b).sum();
  }
  return x.grid().cell_width * acc;
}

}  // namespace ncvharm
