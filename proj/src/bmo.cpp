#include "ncvharm/bmo.hpp"

#include <algorithm>
#include <cmath>

#include "ncvharm/error.hpp"

namespace ncvharm {

std::string to_string(Side s) { return s == Side::column ? "column" : "row"; }

double oscillation(const GridFn& f0, const Interval& iv, Side side) {
  if (!(iv.length() > 0.0)) throw Error("degenerate interval");
  const GridFn f = side == Side::column ? f0 : f0.adjoint();
  const Grid& g = f.grid();
  double covered = 0.0;
  std::size_t first = f.size();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double fr = cell_fraction(g, i, iv);
    if (fr == 0.0) continue;
    if (first == f.size()) first = i;
    covered += fr * g.cell_width;
  }
  // Inside the window the oscillation is shift invariant; subtracting a cell
  // value makes constants cancel exactly.
  const bool inside = covered >= iv.length() * (1.0 - 1e-12) && first < f.size();
  const Mat ref = inside ? f[first] : Mat::Zero(f.rows(), f.cols());
  Mat mean = Mat::Zero(f.rows(), f.cols());
  for (std::size_t i = first; i < f.size(); ++i) {
    const double fr = cell_fraction(g, i, iv);
    if (fr > 0.0) mean += (fr * g.cell_width) * (f[i] - ref);
  }
  mean /= iv.length();
  Mat q = Mat::Zero(f.cols(), f.cols());
  for (std::size_t i = first; i < f.size(); ++i) {
    const double fr = cell_fraction(g, i, iv);
    if (fr == 0.0) continue;
    const Mat d = (f[i] - ref) - mean;
    q.noalias() += (fr * g.cell_width) * (d.adjoint() * d);
  }
  // Parts of I outside the window carry the value zero.
  const double outside = inside ? 0.0 : std::max(0.0, iv.length() - covered);
  if (outside > 0.0) q.noalias() += outside * (mean.adjoint() * mean);
  return std::sqrt(psd_top_eigenvalue(q / iv.length()));
}

namespace {

struct Scan {
  const GridFn& f;
  std::vector<Mat> p1, p2;
  mutable Mat m, q;

  explicit Scan(const GridFn& fn) : f(fn) {
    const std::size_t n = f.size();
    const double h = f.grid().cell_width;
    p1.assign(n + 1, Mat::Zero(f.rows(), f.cols()));
    p2.assign(n + 1, Mat::Zero(f.cols(), f.cols()));
    const Mat ref = f[0];
    for (std::size_t i = 0; i < n; ++i) {
      const Mat d = f[i] - ref;
      p1[i + 1] = p1[i] + h * d;
      p2[i + 1] = p2[i];
      p2[i + 1].noalias() += h * (d.adjoint() * d);
    }
    m.resize(f.rows(), f.cols());
    q.resize(f.cols(), f.cols());
  }

  // Oscillation squared of cells [i, j).
  double value(std::size_t i, std::size_t j) const {
    const double len = static_cast<double>(j - i) * f.grid().cell_width;
    m = (p1[j] - p1[i]) / len;
    q = (p2[j] - p2[i]) / len;
    q.noalias() -= m.adjoint() * m;
    return psd_top_eigenvalue(q);
  }
};

Interval cells(const Grid& g, std::size_t i, std::size_t j) { return {g.left(i), g.left(j)}; }

}  // namespace

BmoReport bmo_norm(const GridFn& f0, Side side, Search search) {
  if (f0.size() < 2) throw Error("bmo scan needs at least two cells");
  const GridFn f = side == Side::column ? f0 : f0.adjoint();
  const Grid& g = f.grid();
  const std::size_t n = f.size();
  Scan scan(f);
  double best = -1.0;
  std::size_t bi = 0, bj = n;
  std::uint64_t count = 0;
  auto consider = [&](std::size_t i, std::size_t j) {
    const double v = scan.value(i, j);
    ++count;
    if (v > best) {
      best = v;
      bi = i;
      bj = j;
    }
  };
  if (search.kind == Search::Kind::dyadic) {
    for (std::size_t len = 1; len <= n; len *= 2)
      for (std::size_t i = 0; i + len <= n; i += len) consider(i, i + len);
  } else {
    for (std::size_t len = 1; len <= n; ++len)
      for (std::size_t i = 0; i + len <= n; ++i) consider(i, i + len);
  }
  BmoReport rep;
  rep.side = side;
  rep.argmax = cells(g, bi, bj);
  // Recompute at the argmax with the direct two-pass formula.
  rep.norm = oscillation(f, rep.argmax, Side::column);
  rep.aligned_norm = rep.norm;
  if (search.kind == Search::Kind::windows && search.shifts > 0) {
    const int k = search.shifts;
    const double h = g.cell_width;
    const Interval base = rep.argmax;
    for (int s = 0; s < k; ++s) {
      for (int t = 0; t < k; ++t) {
        const double ds = -h + 2.0 * h * (s + 1) / (k + 1);
        const double dt = -h + 2.0 * h * (t + 1) / (k + 1);
        const double a = std::max(g.origin, base.a + ds);
        const double b = std::min(g.end(), base.b + dt);
        if (!(b > a)) continue;
        const Interval cand{a, b};
        const double v = oscillation(f, cand, Side::column);
        ++count;
        if (v > rep.norm) {
          rep.norm = v;
          rep.argmax = cand;
        }
      }
    }
  }
  rep.intervals_scanned = count;
  return rep;
}

std::vector<GarnettPiece> garnett_ladder(const Grid& lattice, const Interval& J) {
  const double h = lattice.cell_width;
  if (!lattice.aligned(J)) throw Error("misaligned truncation interval");
  const long long cells = std::llround(J.length() / h);
  if (cells % 3 != 0) throw Error("misaligned truncation interval");
  const long long third = cells / 3;
  int k = 0;
  while ((1LL << k) < third) ++k;
  if ((1LL << k) != third || k < 1) throw Error("misaligned truncation interval");
  const long long ja = lattice.lattice_index(J.a), jb = lattice.lattice_index(J.b);
  auto at = [&](long long idx) { return lattice.origin + static_cast<double>(idx) * h; };
  std::vector<GarnettPiece> pieces;
  // Right third: pieces of 2^{k-n} cells for n = 1..k-1, then the lumped 2-cell tail.
  long long start = ja + 2 * third;
  std::vector<std::pair<long long, long long>> right;
  for (int n = 1; n <= k - 1; ++n) {
    const long long len = 1LL << (k - n);
    right.emplace_back(start, start + len);
    start += len;
  }
  right.emplace_back(start, jb);
  for (auto [p, q] : right) {
    pieces.push_back({{at(p), at(q)}, {at(2 * jb - q), at(2 * jb - p)}});
  }
  // Left third mirrors the right one about the center of J.
  for (auto [p, q] : right) {
    const long long lp = ja + (jb - q), lq = ja + (jb - p);
    pieces.push_back({{at(lp), at(lq)}, {at(2 * ja - lq), at(2 * ja - lp)}});
  }
  return pieces;
}

GridFn garnett_truncate(const GridFn& phi, const Interval& J) {
  const Grid& lattice = phi.grid();
  const std::vector<GarnettPiece> pieces = garnett_ladder(lattice, J);
  if (!lattice.window().contains(J)) throw Error("truncation interval outside the window");
  const double len = J.length();
  const Grid out_grid = lattice.cover({J.a - 2.0 * len, J.b + 2.0 * len});
  GridFn psi(out_grid, phi.rows(), phi.cols());
  const long long off = out_grid.lattice_index(lattice.origin);
  const long long ja = out_grid.lattice_index(J.a), jb = out_grid.lattice_index(J.b);
  const Mat mean_j = interval_mean(phi, J);
  for (long long i = ja; i < jb; ++i) psi[static_cast<std::size_t>(i)] = phi[static_cast<std::size_t>(i - off)] - mean_j;
  for (const auto& piece : pieces) {
    const long long sa = out_grid.lattice_index(piece.source.a);
    const long long sb = out_grid.lattice_index(piece.source.b);
    Mat acc = Mat::Zero(phi.rows(), phi.cols());
    for (long long i = sa; i < sb; ++i) acc += psi[static_cast<std::size_t>(i)];
    const Mat c = acc / static_cast<double>(sb - sa);
    const long long ra = out_grid.lattice_index(piece.reflected.a);
    const long long rb = out_grid.lattice_index(piece.reflected.b);
    for (long long i = ra; i < rb; ++i) psi[static_cast<std::size_t>(i)] = c;
  }
  return psi;
}

}  // namespace ncvharm
