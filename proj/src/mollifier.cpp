#include "ncvharm/mollifier.hpp"

#include <algorithm>
#include <cmath>

#include "ncvharm/error.hpp"
#include "ncvharm/quadrature.hpp"

namespace ncvharm {

namespace bump {

double density(double x) {
  if (x <= -1.0 || x >= 1.0) return 0.0;
  const double s = 1.0 - x * x;
  return 15.0 / 16.0 * s * s;
}

double density_derivative(double x) {
  if (x <= -1.0 || x >= 1.0) return 0.0;
  return -15.0 / 4.0 * x * (1.0 - x * x);
}

double cdf(double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double x2 = x * x;
  return 0.5 + 15.0 / 16.0 * x * (1.0 - x2 * (2.0 / 3.0) + x2 * x2 / 5.0);
}

double second(double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return x;
  const double x2 = x * x;
  return 0.5 * (x + 1.0) +
         15.0 / 16.0 * (x2 * (0.5 - x2 / 6.0 + x2 * x2 / 30.0) - 11.0 / 30.0);
}

double autocorrelation(double w) {
  w = std::abs(w);
  if (w >= 2.0) return 0.0;
  // Polynomial of degree 8 in u; 5 Gauss points are exact.
  return gauss_integrate([w](double u) { return density(u) * density(u - w); }, w - 1.0, 1.0, 5);
}

double derivative_sup() { return std::abs(density_derivative(1.0 / std::sqrt(3.0))); }

}  // namespace bump

Mollifier::Mollifier(int m) : scale(m) {
  if (m < 1) throw Error("mollifier scale must be >= 1");
}

double Mollifier::operator()(double x) const { return scale * bump::density(scale * x); }

double Mollifier::autocorrelation(double w) const { return scale * bump::autocorrelation(scale * w); }

double BumpProfile::second(double u) const { return bump::second(m_ * u) / m_; }

TruncatedBumpProfile::TruncatedBumpProfile(int m, double u0, double u1)
    : m_(m), u0_(std::max(u0, -1.0 / m)), u1_(std::min(u1, 1.0 / m)) {
  if (!(u1_ > u0_)) throw Error("empty profile window");
}

double TruncatedBumpProfile::cdf(double u) const { return bump::cdf(m_ * u); }
double TruncatedBumpProfile::second_raw(double u) const { return bump::second(m_ * u) / m_; }

double TruncatedBumpProfile::mass() const { return cdf(u1_) - cdf(u0_); }

double TruncatedBumpProfile::second(double u) const {
  if (u <= u0_) return 0.0;
  const double c0 = cdf(u0_);
  const double top = std::min(u, u1_);
  double g = second_raw(top) - second_raw(u0_) - (top - u0_) * c0;
  if (u > u1_) g += (u - u1_) * (cdf(u1_) - c0);
  return g;
}

GridFn convolve_profile(const GridFn& f, const Profile& p) {
  const Grid& g = f.grid();
  const double h = g.cell_width;
  // Offsets q (in cells) between output and input cells with overlapping support.
  const long long qlo = static_cast<long long>(std::floor(p.lo() / h)) - 1;
  const long long qhi = static_cast<long long>(std::ceil(p.hi() / h)) + 1;
  std::vector<long long> qs;
  std::vector<double> coef;
  for (long long q = qlo; q <= qhi; ++q) {
    const double s = static_cast<double>(q) * h;
    if (!(s + h > p.lo() && s - h < p.hi())) continue;
    const double c = (p.second(s + h) - 2.0 * p.second(s) + p.second(s - h)) / h;
    qs.push_back(q);
    coef.push_back(c);
  }
  const long long left = std::max<long long>(0, -qs.front());
  const long long right = std::max<long long>(0, qs.back());
  const Grid out_grid = g.widen(static_cast<std::size_t>(left), static_cast<std::size_t>(right));
  GridFn out(out_grid, f.rows(), f.cols());
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (f[j].isZero(0.0)) continue;
    for (std::size_t k = 0; k < qs.size(); ++k) {
      const long long idx = static_cast<long long>(j) + qs[k] + left;
      out[static_cast<std::size_t>(idx)].noalias() += coef[k] * f[j];
    }
  }
  return out;
}

GridFn convolve(const GridFn& f, const Mollifier& phi) { return convolve_profile(f, BumpProfile(phi.scale)); }

}  // namespace ncvharm
