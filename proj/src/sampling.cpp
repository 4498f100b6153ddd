#include "ncvharm/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ncvharm/error.hpp"
#include "ncvharm/quadrature.hpp"

namespace ncvharm {

Rng item_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

Mat random_mat(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> nd;
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cplx(nd(rng), nd(rng));
  return m;
}

Mat random_psd(Rng& rng, Eigen::Index n) {
  const Mat c = random_mat(rng, n, n);
  return c.adjoint() * c;
}

Mat random_unit_hs(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Mat m = random_mat(rng, rows, cols);
  return m / m.norm();
}

GridFn random_gridfn(Rng& rng, const Grid& g, Eigen::Index rows, Eigen::Index cols) {
  std::vector<Mat> vals(g.num_cells);
  for (auto& v : vals) v = random_mat(rng, rows, cols);
  return GridFn(g, std::move(vals));
}

GridFn random_steps(Rng& rng, const Grid& g, Eigen::Index n, int max_pieces) {
  std::uniform_int_distribution<int> pieces_d(2, std::max(2, max_pieces));
  const int pieces = pieces_d(rng);
  std::uniform_int_distribution<std::size_t> cut_d(1, g.num_cells - 1);
  std::vector<std::size_t> cuts{0, g.num_cells};
  for (int p = 1; p < pieces; ++p) cuts.push_back(cut_d(rng));
  std::sort(cuts.begin(), cuts.end());
  GridFn f(g, n, n);
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const Mat v = random_mat(rng, n, n);
    for (std::size_t i = cuts[c]; i < cuts[c + 1]; ++i) f[i] = v;
  }
  return f;
}

GridFn random_mean_zero(Rng& rng, const Grid& g, Eigen::Index n) {
  GridFn f = random_gridfn(rng, g, n, n);
  const Mat mean = integrate(f) / g.window().length();
  for (std::size_t i = 0; i < f.size(); ++i) f[i] -= mean;
  return f;
}

Interval random_aligned_interval(Rng& rng, const Grid& g, std::size_t max_cells) {
  if (g.num_cells < 2) throw Error("grid too small for an interval");
  const std::size_t top = std::min(max_cells, g.num_cells);
  std::uniform_int_distribution<std::size_t> len_d(2, std::max<std::size_t>(2, top));
  const std::size_t len = len_d(rng);
  std::uniform_int_distribution<std::size_t> start_d(0, g.num_cells - len);
  const std::size_t s = start_d(rng);
  return {g.left(s), g.left(s + len)};
}

CAtom random_atom_on(Rng& rng, const Grid& g, const Interval& I, Eigen::Index n, double min_fill) {
  const Grid gi = g.cover(I);
  GridFn b = random_gridfn(rng, gi, n, n);
  const Mat mean = integrate(b) / I.length();
  for (std::size_t i = 0; i < b.size(); ++i) b[i] -= mean;
  std::uniform_real_distribution<double> fill_d(min_fill, 1.0);
  const double fill = fill_d(rng);
  const double norm = weighted_l2_norm(b);
  if (norm > 0.0) b *= fill / (norm * std::sqrt(I.length()));
  return CAtom{std::move(b), random_unit_hs(rng, n, n), I};
}

CAtom random_atom(Rng& rng, const Grid& g, Eigen::Index n, std::size_t max_cells, double min_fill) {
  const Interval I = random_aligned_interval(rng, g, max_cells);
  return random_atom_on(rng, g, I, n, min_fill);
}

GridFn random_smooth(Rng& rng, const Grid& g, const Interval& support, Eigen::Index n, int modes) {
  std::vector<Mat> coef;
  for (int k = 0; k < modes; ++k) coef.push_back(random_mat(rng, n, n));
  const double len = support.length();
  // sin^2 envelope keeps the profile C^1 at the ends of the support.
  auto profile = [&](double t, int k) {
    const double u = (t - support.a) / len;
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double env = std::sin(std::numbers::pi * u);
    return env * env * std::cos(std::numbers::pi * k * u);
  };
  GridFn f(g, n, n);
  for (std::size_t i = 0; i < g.num_cells; ++i) {
    for (int k = 0; k < modes; ++k) {
      const double avg =
          gauss_integrate([&](double t) { return profile(t, k); }, g.left(i), g.right(i), 6) / g.cell_width;
      if (avg != 0.0) f[i] += avg * coef[static_cast<std::size_t>(k)];
    }
  }
  return f;
}

}  // namespace ncvharm
