#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ncvharm/czo.hpp"
#include "ncvharm/error.hpp"
#include "ncvharm/mollifier.hpp"
#include "ncvharm/quadrature.hpp"
#include "ncvharm/sampling.hpp"

using namespace ncvharm;

namespace {

const double kLn3 = std::log(3.0);

// Gauss panels graded geometrically towards both ends; handles log endpoint singularities.
template <class F>
double graded_gauss(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (int k = 0; k < 48; ++k) {
    const double s1 = std::ldexp(1.0, -k), s0 = std::ldexp(1.0, -k - 1);
    acc += gauss_integrate(f, a + (mid - a) * s0, a + (mid - a) * s1, 12);
    acc += gauss_integrate(f, b - (b - mid) * s1, b - (b - mid) * s0, 12);
  }
  return acc;
}

// Hilbert transform of the unit bump, PV int phi(v) / (u - v) dv. With p the polynomial
// 15/16 (1 - u^2)^2 this is p(u) ln|(1 + u)/(1 - u)| plus the integral of (p(v) - p(u))/(u - v).
double bump_hilbert(double u) {
  const auto p = [](double t) { return 15.0 / 16.0 * (1.0 - t * t) * (1.0 - t * t); };
  const double smooth = gauss_integrate([&](double v) { return (p(v) - p(u)) / (u - v); }, -1.0, 1.0, 12);
  const double pu = p(u);
  return pu == 0.0 ? smooth : pu * std::log(std::abs((1.0 + u) / (1.0 - u))) + smooth;
}

// K_m(d) for the Hilbert kernel as the pairing <T phi_m(. - y), phi_m(x - .)> with d = x - y:
// m int phi(r) (H phi)(m d - r) dr, split at the log singularities r = m d +- 1.
double mollified_hilbert_oracle(int m, double d) {
  const double s = m * d;
  std::vector<double> br{-1.0, 1.0};
  for (double c : {s - 1.0, s + 1.0})
    if (c > -1.0 && c < 1.0) br.push_back(c);
  std::sort(br.begin(), br.end());
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < br.size(); ++k)
    acc += graded_gauss([&](double r) { return bump::density(r) * bump_hilbert(s - r); }, br[k], br[k + 1]);
  return m * acc;
}

}  // namespace

TEST_CASE("hormander constant anchors") {
  const HormanderEstimate h = hormander_constant(*hilbert_kernel(), 2.0);
  CHECK(std::abs(h.c_lambda - kLn3) < 1e-4);
  CHECK(h.converged);
  CHECK(h.tail_bound < 1e-5);
  CHECK(h.pairs_sampled > 0);
  const HormanderEstimate z = hormander_constant(*constant_kernel(Mat::Constant(2, 2, cplx(0.3, -1.0))), 2.0);
  CHECK(z.c_lambda == 0.0);
  CHECK(z.tail_bound == 0.0);
  const HormanderEstimate r = hormander_constant(*rotated_kernel(), 2.0);
  CHECK(r.c_lambda <= kLn3 + 1e-4);
  CHECK(r.c_lambda > 0.5);
  CHECK_THROWS_AS(hormander_constant(*hilbert_kernel(), 0.5), Error);
}

TEST_CASE("hormander pair matches closed form") {
  // int_{|x| >= lambda d} |1/x - 1/(x - d)| dx = ln((lambda + 1)/(lambda - 1)) for y = d, y' = 0.
  for (double lam : {1.5, 2.0, 4.0}) {
    for (double d : {1e-2, 0.3, 7.0}) {
      const PairIntegral p = hormander_pair(*hilbert_kernel(), d, 0.0, lam);
      const double exact = std::log((lam + 1.0) / (lam - 1.0));
      CHECK(std::abs(p.value - exact) <= 1e-5);
      CHECK(p.value <= exact);
      CHECK(p.value + p.tail_bound >= exact - 1e-9);
    }
  }
}

TEST_CASE("hormander sample growth is monotone") {
  HormanderOptions o;
  o.pairs.anchors = {0.0, 0.7};
  const double c1 = hormander_constant(*rotated_kernel(), 2.0, o).c_lambda;
  o.pairs.per_decade *= 2;
  const double c2 = hormander_constant(*rotated_kernel(), 2.0, o).c_lambda;
  CHECK(c2 >= c1 - 1e-9);
}

TEST_CASE("apply kernel modularity") {
  Rng rng(61);
  const Grid g(-1.0, 1.0 / 8, 16);
  const std::vector<std::pair<KernelPtr, double>> ks{
      {hilbert_kernel(2), 0.0},
      {hilbert_kernel(2), 0.2},
      {rotated_kernel(), 0.0},
      {band_multiplier_kernel([](double x) { return 1.0 + x * x; }, 0.3, 2), 0.0},
      {mollified_kernel(rotated_kernel(), 4), 0.0}};
  for (const auto& [k, delta] : ks) {
    INFO(k->tag(), delta);
    const GridFn f = random_gridfn(rng, g, 2, 3);
    const Mat h = random_mat(rng, 3, 2);
    const GridFn lhs = apply_kernel(*k, right_multiply(f, h), delta);
    const GridFn rhs = right_multiply(apply_kernel(*k, f, delta), h);
    double scale = 0.0;
    for (std::size_t i = 0; i < rhs.size(); ++i) scale = std::max(scale, rhs[i].norm());
    CHECK(max_cell_diff(lhs, rhs) <= 1e-12 * std::max(1.0, scale));
  }
}

TEST_CASE("hilbert of an indicator is antisymmetric") {
  const Grid g(0.0, 1.0 / 8, 8);
  const GridFn f = constant_fn(g, identity(1));
  ApplyOptions o;
  o.out_grid = Grid(-2.0, 1.0 / 8, 40);
  const GridFn tf = apply_kernel(*hilbert_kernel(), f, 0.0, o);
  for (std::size_t i = 0; i < 40; ++i) CHECK(std::abs(tf[i](0, 0) + tf[39 - i](0, 0)) < 1e-6);
  // Away from the edges the cell average approaches ln|x / (x - 1)|.
  const double x = o.out_grid->mid(4);
  CHECK(tf[4](0, 0).real() == doctest::Approx(std::log(std::abs(x / (x - 1.0)))).epsilon(1e-3));
}

TEST_CASE("apply kernel rejects a truncation below the band") {
  const Grid g(0.0, 0.25, 4);
  const GridFn f = constant_fn(g, identity(1));
  const KernelPtr m = mollified_kernel(hilbert_kernel(), 2);
  CHECK_NOTHROW(apply_kernel(*m, f, 0.0));
  CHECK_THROWS_AS(apply_kernel(*hilbert_kernel(2), f, 0.0), Error);  // dim mismatch
}

TEST_CASE("separated supports double integral") {
  Rng rng(62);
  const Grid gj(0.0, 1.0 / 16, 16);
  const Grid gi(2.0, 1.0 / 16, 16);
  for (const KernelPtr& k : {hilbert_kernel(2), rotated_kernel()}) {
    const GridFn f = random_gridfn(rng, gj, 2, 2);
    const GridFn gx = random_gridfn(rng, gi, 2, 2);
    ApplyOptions o;
    o.out_grid = gi;
    const GridFn tf = apply_kernel(*k, f, 0.0, o);
    cplx lhs = 0.0;
    for (std::size_t i = 0; i < gi.num_cells; ++i) lhs += gi.cell_width * (gx[i] * tf[i]).trace();
    cplx rhs = 0.0;
    for (std::size_t i = 0; i < gi.num_cells; ++i)
      for (std::size_t j = 0; j < gj.num_cells; ++j) {
        const GaussRule& r = gauss_legendre(16);
        for (std::size_t p = 0; p < r.nodes.size(); ++p)
          for (std::size_t q = 0; q < r.nodes.size(); ++q) {
            const double x = gi.left(i) + 0.5 * gi.cell_width * (r.nodes[p] + 1.0);
            const double y = gj.left(j) + 0.5 * gj.cell_width * (r.nodes[q] + 1.0);
            const double w = 0.25 * gi.cell_width * gj.cell_width * r.weights[p] * r.weights[q];
            rhs += w * (k->eval(x, y) * f[j] * gx[i]).trace();
          }
      }
    CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("operator norm estimates") {
  const Grid probe(0.0, 1.0 / 16, 64);
  const NormEstimate z = l2_operator_norm(*zero_kernel(2), 0.0, probe);
  CHECK(z.value == 0.0);
  CHECK(z.converged);
  const auto w = [](double x) { return 1.0 + 0.5 * std::sin(x); };
  const NormEstimate b = l2_operator_norm(*band_multiplier_kernel(w, 1.0 / 32), 0.0, probe);
  CHECK(std::abs(b.value - 1.5) <= 0.05 * 1.5);
  // Hilbert: increasing towards pi as the truncation shrinks on a fine probe.
  const Grid fine(0.0, 1.0 / 512, 512);
  double prev = 0.0;
  for (double delta : {8.0 / 512, 4.0 / 512, 2.0 / 512, 0.0}) {
    const NormEstimate h = l2_operator_norm(*hilbert_kernel(), delta, fine, 400, 1e-10);
    CHECK(h.value >= prev - 1e-9);
    CHECK(h.value <= std::numbers::pi * (1.0 + 1e-9));
    prev = h.value;
  }
  CHECK(prev >= 0.98 * std::numbers::pi);
}

TEST_CASE("mollified kernel of a constant") {
  const Mat c = Mat::Constant(2, 2, cplx(0.5, 0.25));
  const KernelPtr km = mollified_kernel(constant_kernel(c), 8);
  for (double d : {-3.0, -0.1, 0.0, 0.05, 0.2, 4.0}) CHECK((km->eval(d + 0.3, 0.3) - c).norm() < 1e-12);
  CHECK(mollified_info(*km).scale == 8);
  CHECK(mollified_info(*hilbert_kernel()).parent == nullptr);
}

TEST_CASE("mollified hilbert kernel matches pairing oracle") {
  const KernelPtr k = hilbert_kernel();
  for (int m : {2, 8, 32}) {
    const KernelPtr km = mollified_kernel(k, m);
    for (double d : {0.0, 0.1 / m, 0.5 / m, 1.0 / m, 1.7 / m, 2.0 / m, 3.0 / m, 1.0, -0.9 / m}) {
      const double got = km->eval(d, 0.0)(0, 0).real();
      const double want = mollified_hilbert_oracle(m, d);
      CHECK(std::abs(got - want) <= 1e-8 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("mollified kernel converges at second order") {
  // Even mollifier: K_m(1) - 1 = int w^2 psi_m(w) dw + O(m^-4) = 2 / (7 m^2) + O(m^-4).
  const double c = 2.0 / 7.0;
  for (int m : {8, 16, 32, 64}) {
    const double err = mollified_kernel(hilbert_kernel(), m)->eval(1.0, 0.0)(0, 0).real() - 1.0;
    CHECK(err > 0.0);
    CHECK(err * m * m <= c * 1.02);
    CHECK(err * m * m >= c * 0.98);
  }
}

TEST_CASE("mollified rotated kernel factorizes") {
  // The rotation depends on x only, so K_m is the x-average of M against the Hilbert pairing.
  const KernelPtr km = mollified_kernel(rotated_kernel(), 4);
  const Mat v = km->eval(0.3, 0.0);
  CHECK(v.allFinite());
  CHECK(v.rows() == 2);
  const double bound = std::numbers::pi * 4.0 * bump::kL2NormSq;
  for (double d : {0.0, 0.2, 0.4, 0.6, 2.0})
    CHECK(std::sqrt(psd_top_eigenvalue(km->eval(d, 0.0).adjoint() * km->eval(d, 0.0))) <= bound);
}

TEST_CASE("mollified kernel lipschitz bound") {
  Rng rng(63);
  const double t_norm = std::numbers::pi;
  const double phi_l2 = std::sqrt(bump::kL2NormSq);
  const double dphi = bump::derivative_sup();
  for (int m : {4, 16}) {
    const KernelPtr km = mollified_kernel(hilbert_kernel(), m, t_norm);
    std::uniform_real_distribution<double> ux(-3.0 / m, 3.0 / m);
    std::uniform_real_distribution<double> ul(std::log(1e-3 / m), std::log(1.0 / m));
    for (int t = 0; t < 200; ++t) {
      const double x = ux(rng), y = ux(rng);
      const double dy = std::exp(ul(rng)) * (t % 2 ? 1.0 : -1.0);
      const double lhs = std::abs(km->eval(x, y)(0, 0) - km->eval(x, y + dy)(0, 0));
      const double rhs = double(m) * m * std::abs(dy) * t_norm * phi_l2 * dphi;
      CHECK(lhs <= rhs * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("mollified apply converges to the truncated operator") {
  Rng rng(64);
  const Grid g(-2.0, 1.0 / 64, 256);
  const GridFn f = random_smooth(rng, g, {-1.0, 1.0}, 1);
  const GridFn tf = apply_kernel(*hilbert_kernel(), f, 0.0);
  const double base = weighted_l2_norm(tf);
  double prev = kInf;
  for (int m : {4, 8, 16, 32}) {
    const GridFn tm = mollified_apply(*hilbert_kernel(), f, m, 0.0, g);
    const double err = weighted_l2_norm(tm - tf);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.05 * base);
}

TEST_CASE("cz atom checks") {
  Rng rng(65);
  const Grid g(-2.0, 1.0 / 16, 64);
  const CAtom a0 = random_atom(rng, g, 2, 16);
  CzBounds zb;
  const CzAtomReport z = cz_atom_check(*zero_kernel(2), 0.0, a0, zb);
  CHECK(z.total == 0.0);
  CHECK(z.pass());
  const Grid probe(0.0, g.cell_width, 256);
  for (const KernelPtr& k : {hilbert_kernel(2), rotated_kernel()}) {
    CzBounds b;
    b.lambda = 2.0;
    b.c_lambda = hormander_constant(*k, 2.0).upper();
    b.t_norm = std::max(l2_operator_norm(*k, 0.0, probe).value, 0.0);
    for (int t = 0; t < 40; ++t) {
      const CAtom a = random_atom(rng, g, 2, 16);
      const CzAtomReport r = cz_atom_check(*k, 0.0, a, b);
      CHECK(r.near_ok);
      CHECK(r.far_ok);
      CHECK(r.total_ok);
      CHECK(r.total == doctest::Approx(r.near + r.far));
    }
  }
  CHECK(commutator_witness(*rotated_kernel()) > 0.1);
  CHECK(commutator_witness(*hilbert_kernel(2)) == 0.0);
}

TEST_CASE("apply to decomposition") {
  Rng rng(66);
  const Grid g(-2.0, 1.0 / 16, 64);
  CzBounds b;
  b.c_lambda = kLn3;
  b.t_norm = std::numbers::pi;
  CDecomposition empty;
  empty.target_grid = g;
  const DecompositionApply e = apply_to_decomposition(*hilbert_kernel(2), 0.0, empty, b);
  CHECK(e.result.is_zero());
  CHECK(e.pass);
  // Single atom agrees with the atom check on the same window.
  const CAtom a = random_atom(rng, g, 2, 16);
  CDecomposition one;
  one.terms.push_back({1.0, a});
  one.target_grid = g;
  const Grid w = g.cover({a.I.center() - 64 * a.I.length(), a.I.center() + 64 * a.I.length()});
  const DecompositionApply d1 = apply_to_decomposition(*hilbert_kernel(2), 0.0, one, b, w);
  const CzAtomReport r = cz_atom_check(*hilbert_kernel(2), 0.0, a, b);
  CHECK(d1.l1 == doctest::Approx(r.total).epsilon(1e-12));
  // Two decompositions of the same function.
  const CAtom a1 = random_atom(rng, g, 2, 16), a2 = random_atom(rng, g, 2, 16);
  CDecomposition hand;
  hand.terms = {{cplx(0.7), a1}, {cplx(-1.3, 0.2), a2}};
  hand.target_grid = g;
  const GridFn f = hand.reconstruct();
  const CDecomposition auto_dec = c_decompose(f);
  const Grid big = g.cover({-40.0, 40.0});
  const DecompositionApply p = apply_to_decomposition(*hilbert_kernel(2), 0.0, hand, b, big);
  const DecompositionApply q = apply_to_decomposition(*hilbert_kernel(2), 0.0, auto_dec, b, big);
  CHECK(p.pass);
  CHECK(q.pass);
  const double scale = std::max(hand.abs_lambda_sum(), auto_dec.abs_lambda_sum());
  CHECK(l1_norm(p.result - q.result) < 1e-6 * scale);
}

TEST_CASE("mollified kernel hormander stays bounded") {
  HormanderOptions o;
  o.x_extent = 1e4;
  double prev = -1.0;
  for (int m : {4, 16}) {
    const HormanderEstimate h = hormander_constant(*mollified_kernel(hilbert_kernel(), m), 4.0, o);
    CHECK(std::isfinite(h.upper()));
    CHECK(h.c_lambda < 2.0);
    if (prev >= 0.0) CHECK(std::abs(h.c_lambda - prev) < 0.2);
    prev = h.c_lambda;
  }
}

TEST_CASE("rotation factor") {
  const cplx i(0.0, 1.0);
  Mat sx(2, 2), sy(2, 2);
  sx << 0.0, 1.0, 1.0, 0.0;
  sy << 0.0, -i, i, 0.0;
  for (double x : {-2.0, 0.0, 0.4, 1.3, 5.0}) {
    const Mat m = rotation_factor(x);
    const Mat ref = std::cos(x) * identity(2) + i * std::sin(x) * (std::cos(x) * sx + std::sin(x) * sy);
    CHECK((m - ref).norm() < 1e-15);
    CHECK((m.adjoint() * m - identity(2)).norm() < 1e-14);
  }
  CHECK((rotated_kernel()->eval(0.7, 0.2) - rotation_factor(0.7) / 0.5).norm() < 1e-14);
}
