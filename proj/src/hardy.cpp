#include "ncvharm/hardy.hpp"

#include <algorithm>
#include <cmath>

#include "ncvharm/error.hpp"
#include "ncvharm/mollifier.hpp"

namespace ncvharm {

namespace {

constexpr double kMeanTol = 1e-10;
constexpr double kNormTol = 1e-12;
constexpr double kHolderTol = 1e-10;

// int ||f(t)||_2 dt, the scale used for mean-zero tolerances.
double l1_hs(const GridFn& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i].norm();
  return f.grid().cell_width * acc;
}

}  // namespace

AtomReport validate_atom(const CAtom& a) {
  AtomReport r;
  const Grid& g = a.b.grid();
  double leak = 0.0;
  for (std::size_t i = 0; i < a.b.size(); ++i) {
    const double outside = 1.0 - cell_fraction(g, i, a.I);
    if (outside > 0.0) leak += outside * g.cell_width * a.b[i].squaredNorm();
  }
  const double l2 = weighted_l2_norm(a.b);
  r.support_leak = std::sqrt(leak);
  r.support_ok = r.support_leak <= kMeanTol * l2;
  r.mean_norm = integrate(a.b, a.I).norm();
  r.mean_zero_ok = r.mean_norm <= kMeanTol * l2 * a.I.length();
  r.norm_slack = l2 * std::sqrt(a.I.length());
  r.norm_ok = r.norm_slack <= 1.0 + kNormTol;
  r.h_norm = a.h.norm();
  r.h_ok = std::abs(r.h_norm - 1.0) <= kNormTol;
  r.l1_norm = l1_norm(a.value());
  r.holder_ok = r.l1_norm <= 1.0 + kHolderTol;
  r.valid = r.support_ok && r.mean_zero_ok && r.norm_ok && r.h_ok;
  return r;
}

ColumnFactorization factorize_column(const GridFn& f) {
  if (f.is_zero()) throw Error("zero function");
  const Mat q = column_gram(f);
  const Mat g = sqrt_psd(q);
  ColumnFactorization out{right_multiply(f, sqrt_psd(g, true)), sqrt_psd(g)};
  return out;
}

MeyerResult meyer_decompose(const GridFn& F) {
  MeyerResult res;
  if (F.is_zero()) return res;
  const Mat total = integrate(F);
  if (total.norm() > kMeanTol * l1_hs(F)) throw Error("not mean-zero");
  const Grid& g = F.grid();
  double reach = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i)
    if (!F[i].isZero(0.0)) reach = std::max({reach, std::abs(g.left(i)), std::abs(g.right(i))});
  int jmax = 0;
  while (std::ldexp(1.0, jmax) < reach * (1.0 - 1e-15)) ++jmax;
  for (int j = 0; j <= jmax + 1; ++j) {
    const double r = std::ldexp(1.0, j);
    if (!g.on_lattice(r) || !g.on_lattice(-r)) throw Error("grid lattice misses annulus radius");
  }
  const Grid work = g.cover({-std::ldexp(1.0, jmax + 1), std::ldexp(1.0, jmax + 1)});
  const GridFn fw = crop(F, work);
  const double h = g.cell_width;
  const std::size_t nj = static_cast<std::size_t>(jmax) + 1;
  // Annulus index of each cell by the absolute value of its midpoint.
  auto annulus = [&](std::size_t i) {
    const double x = std::abs(work.mid(i));
    int j = 0;
    while (std::ldexp(1.0, j) < x) ++j;
    return j;
  };
  std::vector<Mat> integral(nj, Mat::Zero(F.rows(), F.cols()));
  std::vector<int> cell_annulus(work.num_cells);
  for (std::size_t i = 0; i < work.num_cells; ++i) {
    cell_annulus[i] = annulus(i);
    if (cell_annulus[i] <= jmax) integral[static_cast<std::size_t>(cell_annulus[i])] += h * fw[i];
  }
  std::vector<Mat> tail(nj + 1, Mat::Zero(F.rows(), F.cols()));
  for (std::size_t j = nj; j-- > 0;) tail[j] = integral[j] + tail[j + 1];
  for (int j = 0; j <= jmax; ++j) {
    const std::size_t ju = static_cast<std::size_t>(j);
    const double outer = std::ldexp(1.0, j + 1), inner = std::ldexp(1.0, j);
    const Interval support{-outer, outer};
    const Grid gj = work.cover(support);
    GridFn aj(gj, F.rows(), F.cols());
    const long long off = work.lattice_index(gj.origin);
    const Mat up = tail[ju + 1] * std::ldexp(1.0, -(j + 2));
    const Mat down = tail[ju] * std::ldexp(1.0, -(j + 1));
    for (std::size_t i = 0; i < gj.num_cells; ++i) {
      const std::size_t w = static_cast<std::size_t>(off) + i;
      Mat v = up;
      if (cell_annulus[w] == j) v += fw[w];
      if (std::abs(gj.mid(i)) <= inner) v -= down;
      aj[i] = v;
    }
    double lambda = 0.0;
    if (!aj.is_zero()) {
      lambda = weighted_l2_norm(aj) * std::sqrt(support.length());
      res.terms.push_back({j, lambda, (1.0 / lambda) * aj, support});
    }
    res.trace.push_back({j, inner, integral[ju], tail[ju], lambda});
  }
  return res;
}

double CDecomposition::abs_lambda_sum() const {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.lambda);
  return s;
}

GridFn CDecomposition::reconstruct() const {
  Eigen::Index rows = 1, cols = 1;
  if (!terms.empty()) {
    rows = terms.front().atom.b.rows();
    cols = terms.front().atom.h.cols();
  }
  GridFn out(target_grid, rows, cols);
  for (const auto& t : terms) out += embed(t.lambda * t.atom.value(), target_grid);
  return out;
}

CDecomposition c_decompose(const GridFn& f0, bool center) {
  GridFn f = f0;
  if (center) {
    const Mat mean = integrate(f) / f.grid().window().length();
    for (std::size_t i = 0; i < f.size(); ++i) f[i] -= mean;
  }
  CDecomposition dec;
  dec.target_grid = f.grid();
  if (f.is_zero()) return dec;
  const ColumnFactorization fac = factorize_column(f);
  const double beta_norm = fac.beta.norm();
  const Mat h = fac.beta / beta_norm;
  const MeyerResult mr = meyer_decompose(fac.F);
  bool first = true;
  for (const auto& t : mr.terms) {
    dec.terms.push_back({cplx(t.lambda * beta_norm, 0.0), CAtom{t.b, h, t.support}});
    dec.target_grid = first ? t.b.grid() : hull(dec.target_grid, t.b.grid());
    first = false;
  }
  return dec;
}

MoleculeReport molecule_check(const GridFn& f, double x0, double d) {
  if (!(d > 0.0)) throw Error("molecule width must be positive");
  const Grid& g = f.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = g.left(i) - x0, b = g.right(i) - x0;
    const double w = (b - a) + (b * b * b - a * a * a) / (3.0 * d * d);
    acc += w * f[i].squaredNorm();
  }
  MoleculeReport r;
  r.weighted_norm = std::sqrt(acc);
  r.ratio = r.weighted_norm * std::sqrt(d);
  r.mean_norm = integrate(f).norm();
  r.mean_zero = r.mean_norm <= kMeanTol * std::max(l1_hs(f), 0.0);
  r.pass = r.pass_with(1.0);
  return r;
}

cplx duality_pair(const GridFn& phi, const CAtom& a) {
  if (phi.cols() != a.b.rows()) throw Error("dim mismatch");
  return trace_pairing(phi, a.value());
}

CAtom extremal_atom(const GridFn& phi, const Interval& I) {
  const Grid& g = phi.grid();
  if (!g.aligned(I) || !g.window().contains(I)) throw Error("interval not grid-aligned");
  const Grid gi = g.cover(I);
  const GridFn x0 = crop(phi, gi);
  const Mat mean = interval_mean(phi, I);
  Mat q = Mat::Zero(phi.rows(), phi.rows());
  std::vector<Mat> x(gi.num_cells);
  double scale = 0.0;
  for (std::size_t i = 0; i < gi.num_cells; ++i) {
    x[i] = x0[i] - mean;
    q.noalias() += gi.cell_width * (x[i] * x[i].adjoint());
    scale = std::max(scale, x0[i].cwiseAbs().maxCoeff());
  }
  const Eigenpair top = top_eigenpair(q);
  const double len = I.length();
  const double sigma = std::sqrt(std::max(top.value, 0.0) / len);
  if (!(sigma > 1e-14 * scale)) throw Error("flat on I");
  const Eigen::Index p = phi.rows();
  Vec w = Vec::Zero(p);
  w(0) = 1.0;
  const Mat vw = top.vector * w.adjoint();
  std::vector<Mat> vals(gi.num_cells);
  for (std::size_t i = 0; i < gi.num_cells; ++i) vals[i] = x[i].adjoint() * vw / (sigma * len);
  return CAtom{GridFn(gi, std::move(vals)), w * top.vector.adjoint(), I};
}

MollifiedAtom mollify_atom(const CAtom& a, int n) {
  if (n < 1) throw Error("mollifier scale must be >= 1");
  MollifiedAtom out;
  const Grid& g = a.b.grid();
  const double len = a.I.length();
  const double radius = 1.0 / n;
  const int pieces = static_cast<int>(std::floor(2.0 / (n * len))) + 1;
  const double piece_len = 2.0 * radius / pieces;
  for (int j = 0; j < pieces; ++j) {
    const double u0 = -radius + j * piece_len;
    const double u1 = j + 1 == pieces ? radius : -radius + (j + 1) * piece_len;
    const TruncatedBumpProfile prof(n, u0, u1);
    const double weight = 2.0 * prof.mass();
    const Interval support{a.I.a + u0, a.I.b + u1};
    const Grid cover = g.cover(support);
    GridFn bj = crop(convolve_profile(a.b, prof), cover);
    bj *= 1.0 / weight;
    out.combination.emplace_back(weight, CAtom{std::move(bj), a.h, {cover.origin, cover.end()}});
  }
  if (n * len < 2.0) {
    out.notice = "scale too small for the residual clause";
    return out;
  }
  const GridFn conv = convolve(a.b, Mollifier(n));
  const Grid cover = g.cover({a.I.a - radius, a.I.b + radius});
  const GridFn r = crop(conv, cover) - crop(a.b, cover);
  const Interval rs{cover.origin, cover.end()};
  const double coeff = std::sqrt(rs.length()) * weighted_l2_norm(r);
  out.residual_coeff = coeff;
  if (coeff > 0.0) out.residual = CAtom{(1.0 / coeff) * r, a.h, rs};
  return out;
}

}  // namespace ncvharm
