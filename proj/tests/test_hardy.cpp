#include <cmath>

#include "doctest.h"
#include "ncvharm/bmo.hpp"
#include "ncvharm/error.hpp"
#include "ncvharm/hardy.hpp"
#include "ncvharm/mollifier.hpp"
#include "ncvharm/sampling.hpp"

using namespace ncvharm;

namespace {

Mat e11(Eigen::Index n) {
  Mat m = Mat::Zero(n, n);
  m(0, 0) = 1.0;
  return m;
}

// Cellwise Hoelder oracle for ||b h||_{L1(S1)} on scalar-like atoms.
double l1_oracle(const CAtom& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.b.size(); ++i) {
    const Mat v = a.b[i] * a.h;
    Eigen::JacobiSVD<Mat> svd(v);
    acc += svd.singularValues().sum() * a.b.grid().cell_width;
  }
  return acc;
}

}  // namespace

TEST_CASE("validate_atom examples") {
  const Grid g(0.0, 0.25, 4);
  GridFn b(g, 2);
  for (std::size_t i = 0; i < 4; ++i) b[i] = (i < 2 ? 1.0 : -1.0) * e11(2);
  const CAtom a{b, e11(2), {0.0, 1.0}};
  const AtomReport r = validate_atom(a);
  CHECK(r.valid);
  CHECK(r.l1_norm == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.l1_norm == doctest::Approx(l1_oracle(a)).epsilon(1e-14));
  GridFn flat(g, 2);
  for (std::size_t i = 0; i < 4; ++i) flat[i] = e11(2);
  const AtomReport rf = validate_atom({flat, e11(2), {0.0, 1.0}});
  CHECK_FALSE(rf.valid);
  CHECK_FALSE(rf.mean_zero_ok);
  const AtomReport r2 = validate_atom({2.0 * b, e11(2), {0.0, 1.0}});
  CHECK_FALSE(r2.valid);
  CHECK(r2.norm_slack == doctest::Approx(2.0).epsilon(1e-15));
  // Support leak is flagged.
  const AtomReport r3 = validate_atom({b, e11(2), {0.0, 0.75}});
  CHECK_FALSE(r3.support_ok);
}

TEST_CASE("random atoms are valid and contractive") {
  Rng rng(41);
  const Grid g(-1.0, 1.0 / 32, 64);
  for (int t = 0; t < 200; ++t) {
    const CAtom a = random_atom(rng, g, 2, 32);
    const AtomReport r = validate_atom(a);
    CHECK(r.valid);
    CHECK(r.l1_norm <= 1.0 + 1e-10);
  }
}

TEST_CASE("factorize_column") {
  Rng rng(42);
  const Grid g(0.0, 0.125, 16);
  CHECK_THROWS_WITH_AS(factorize_column(GridFn(g, 2)), "zero function", Error);
  // Rank-one simple tensor g(t) m.
  GridFn f(g, 2);
  const Mat m = random_mat(rng, 2, 2);
  Vec u = random_mat(rng, 2, 1).col(0);
  const Mat m1 = u * u.adjoint() * m;  // rank one
  for (std::size_t i = 0; i < g.num_cells; ++i) f[i] = std::sin(0.7 * i + 0.2) * m1;
  const ColumnFactorization fac = factorize_column(f);
  CHECK(max_cell_diff(right_multiply(fac.F, fac.beta), f) < 1e-10);
  // Gram equal to the identity gives beta = Id and F = f.
  GridFn o(g, 2);
  for (std::size_t i = 0; i < 16; ++i) o[i] = identity(2) * std::sqrt(0.5);
  const ColumnFactorization fi = factorize_column(o);
  CHECK((fi.beta - identity(2)).norm() < 1e-14);
  CHECK(max_cell_diff(fi.F, o) < 1e-14);
  for (int t = 0; t < 20; ++t) {
    const GridFn r = random_gridfn(rng, g, 3, 3);
    const ColumnFactorization fr = factorize_column(r);
    const double lhs = weighted_l2_norm(fr.F) * fr.beta.norm();
    const double rhs = column_norm(r, 1.0);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * rhs);
    CHECK(max_cell_diff(right_multiply(fr.F, fr.beta), r) < 1e-10);
  }
}

TEST_CASE("meyer decomposition") {
  Rng rng(43);
  const Grid g(-4.0, 1.0 / 8, 64);
  CHECK(meyer_decompose(GridFn(g, 2)).terms.empty());
  // Supported in [-1, 1]: one term.
  GridFn small = restrict_to(random_gridfn(rng, g, 2, 2), {-1.0, 1.0});
  const Mat mean = integrate(small) / 2.0;
  for (std::size_t i = 0; i < g.num_cells; ++i)
    if (std::abs(g.mid(i)) < 1.0) small[i] -= mean;
  const MeyerResult one = meyer_decompose(small);
  REQUIRE(one.terms.size() == 1);
  CHECK(one.terms[0].j == 0);
  for (int t = 0; t < 20; ++t) {
    const GridFn f = random_mean_zero(rng, g, 2);
    const MeyerResult mr = meyer_decompose(f);
    CHECK(mr.trace.size() == 3);
    GridFn sum(g, 2);
    for (const auto& term : mr.terms) {
      sum = add_on_hull(sum, term.lambda * term.b);
      const CAtom as_atom{term.b, identity(2) / std::sqrt(2.0), term.support};
      const AtomReport r = validate_atom(as_atom);
      CHECK(r.support_ok);
      CHECK(r.mean_zero_ok);
      CHECK(r.norm_slack <= 1.0 + 1e-12);
    }
    CHECK(max_cell_diff(sum, f) < 1e-10);
    // Tail sums telescope to the total integral.
    CHECK(mr.trace.front().tail.norm() < 1e-12);
    for (std::size_t j = 0; j + 1 < mr.trace.size(); ++j)
      CHECK((mr.trace[j].tail - mr.trace[j].integral - mr.trace[j + 1].tail).norm() < 1e-13);
  }
  GridFn biased = random_gridfn(rng, g, 2, 2);
  CHECK_THROWS_WITH_AS(meyer_decompose(biased), "not mean-zero", Error);
  const GridFn off(Grid(-0.95, 0.1, 19), random_mean_zero(rng, Grid(-0.95, 0.1, 19), 1).values());
  CHECK_THROWS_AS(meyer_decompose(off), Error);
}

TEST_CASE("c_decompose") {
  Rng rng(44);
  const Grid g(-2.0, 1.0 / 16, 64);
  CHECK(c_decompose(GridFn(g, 2)).terms.empty());
  for (int t = 0; t < 10; ++t) {
    const GridFn f = random_mean_zero(rng, g, 2);
    const CDecomposition d = c_decompose(f);
    for (const auto& term : d.terms) CHECK(validate_atom(term.atom).valid);
    const GridFn rec = d.reconstruct();
    const GridFn diff = add_on_hull(rec, cplx(-1.0) * f);
    CHECK(l1_norm(diff) < 1e-9 * d.abs_lambda_sum());
  }
  // Centering flag handles a biased input.
  const GridFn biased = random_gridfn(rng, g, 2, 2);
  const CDecomposition dc = c_decompose(biased, true);
  GridFn centered = biased;
  const Mat mean = integrate(biased) / g.window().length();
  for (std::size_t i = 0; i < g.num_cells; ++i) centered[i] -= mean;
  CHECK(l1_norm(add_on_hull(dc.reconstruct(), cplx(-1.0) * centered)) < 1e-9 * dc.abs_lambda_sum());
}

TEST_CASE("c_decompose of a single atom") {
  Rng rng(45);
  const Grid g(-1.0, 1.0 / 16, 32);
  for (int t = 0; t < 10; ++t) {
    const CAtom a = random_atom_on(rng, g, {-0.5, 0.5}, 2, 1.0);
    const CDecomposition d = c_decompose(a.value());
    // A valid atom has H1 norm at most 1; Meyer's normalization over [-2, 2] costs 2.
    CHECK(d.abs_lambda_sum() <= 2.0 * (1.0 + 1e-9));
    CHECK(l1_norm(add_on_hull(d.reconstruct(), cplx(-1.0) * a.value())) < 1e-9);
  }
}

TEST_CASE("molecule check") {
  Rng rng(46);
  const Grid g(-1.0, 1.0 / 16, 32);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const CAtom a = random_atom(rng, g, 2, 32, 1.0);
    const MoleculeReport r = molecule_check(a.b, a.I.center(), a.I.length());
    worst = std::max(worst, r.ratio);
    CHECK(r.pass_with(std::sqrt(2.0)));
    CHECK(r.ratio <= std::sqrt(1.25) * (1.0 + 1e-12));
  }
  CHECK(worst > 1.0);
  CHECK(molecule_check(GridFn(g, 2), 0.0, 1.0).pass);
  const GridFn big = constant_fn(g, 10.0 * identity(2));
  CHECK_FALSE(molecule_check(big, 0.0, 1.0).pass);
}

TEST_CASE("duality pairing") {
  Rng rng(47);
  const Grid g(0.0, 1.0 / 16, 32);
  const CAtom a = random_atom(rng, g, 2, 16);
  CHECK(std::abs(duality_pair(constant_fn(g, random_mat(rng, 2, 2)), a)) < 1e-14);
  for (int t = 0; t < 100; ++t) {
    const GridFn phi = random_gridfn(rng, g, 2, 2);
    const CAtom at = random_atom(rng, g, 2, 32);
    const double bmo = bmo_norm(phi, Side::row).norm;
    const cplx p = duality_pair(phi, at);
    CHECK(std::abs(p) <= bmo * (1.0 + 1e-8));
    const GridFn shifted = phi + constant_fn(g, random_mat(rng, 2, 2));
    CHECK(std::abs(duality_pair(shifted, at) - p) < 1e-12 * (1.0 + std::abs(p)));
  }
}

TEST_CASE("extremal atom") {
  GridFn pm(Grid(0.0, 0.25, 8), 1);
  for (std::size_t i = 0; i < 8; ++i) pm[i](0, 0) = i < 4 ? 1.0 : -1.0;
  const CAtom e = extremal_atom(pm, {0.0, 2.0});
  CHECK(std::abs(duality_pair(pm, e) - 1.0) < 1e-12);
  CHECK(validate_atom(e).valid);
  CHECK_THROWS_WITH_AS(extremal_atom(constant_fn(Grid(0.0, 0.25, 8), identity(1)), {0.0, 1.0}), "flat on I", Error);
  Rng rng(48);
  const Grid g(0.0, 1.0 / 16, 24);
  for (int t = 0; t < 5; ++t) {
    const GridFn phi = random_gridfn(rng, g, 2, 2);
    double best = 0.0;
    for (std::size_t i = 0; i < g.num_cells; ++i)
      for (std::size_t j = i + 2; j <= g.num_cells; ++j) {
        const Interval I{g.left(i), g.left(j)};
        const CAtom x = extremal_atom(phi, I);
        const cplx p = duality_pair(phi, x);
        CHECK(std::abs(p.real() - oscillation(phi, I, Side::row)) <= 1e-9 * p.real());
        best = std::max(best, p.real());
      }
    // Single-cell intervals have zero oscillation, so they cannot be the supremum.
    CHECK(std::abs(best - bmo_norm(phi, Side::row).norm) <= 1e-8 * best);
  }
}

TEST_CASE("extremal atom beats random atoms") {
  Rng rng(49);
  const Grid g(0.0, 1.0 / 16, 16);
  const GridFn phi = random_gridfn(rng, g, 2, 2);
  const Interval I{g.left(3), g.left(13)};
  const double top = duality_pair(phi, extremal_atom(phi, I)).real();
  for (int t = 0; t < 10000; ++t) {
    const CAtom a = random_atom_on(rng, g, I, 2, 1.0);
    CHECK(std::abs(duality_pair(phi, a)) <= top * (1.0 + 1e-6));
  }
}

TEST_CASE("mollify atom") {
  Rng rng(50);
  const Grid g(0.0, 1.0 / 32, 64);
  for (int t = 0; t < 10; ++t) {
    const CAtom a = random_atom(rng, g, 2, 16);
    for (int n : {1, 3, 8, 40}) {
      const MollifiedAtom m = mollify_atom(a, n);
      double wsum = 0.0;
      GridFn sum(g, 2);
      for (const auto& [w, at] : m.combination) {
        wsum += w;
        CHECK(validate_atom(at).valid);
        CHECK(at.I.length() <= 4.0 * a.I.length() + 1e-12);
        sum = add_on_hull(sum, w * at.b);
      }
      CHECK(std::abs(wsum - 2.0) < 1e-10);
      const GridFn direct = convolve(a.b, Mollifier(n));
      CHECK(max_cell_diff(sum, direct) < 1e-10);
      if (n * a.I.length() >= 2.0) {
        REQUIRE(m.residual_coeff.has_value());
        REQUIRE(m.residual.has_value());
        CHECK(validate_atom(*m.residual).valid);
        CHECK(m.residual->I.length() <= 2.0 * a.I.length() + 2.0 * g.cell_width + 1e-12);
        // Residual reconstructs phi_n * b - b.
        const GridFn back = add_on_hull(m.residual_coeff.value() * m.residual->b, a.b);
        CHECK(max_cell_diff(back, direct) < 1e-10);
      } else {
        CHECK_FALSE(m.residual_coeff.has_value());
        CHECK_FALSE(m.notice.empty());
      }
    }
  }
}

TEST_CASE("mollify atom one cell profile") {
  // One-cell profile on a two-cell atom: pieces add back to the full convolution.
  const Grid g(0.0, 0.5, 2);
  GridFn b(g, 1);
  b[0](0, 0) = 1.0;
  b[1](0, 0) = -1.0;
  const CAtom a{b, identity(1), {0.0, 1.0}};
  const MollifiedAtom m = mollify_atom(a, 1);
  CHECK(m.combination.size() == 3);
  GridFn sum(g, 1);
  for (const auto& [w, at] : m.combination) sum = add_on_hull(sum, w * at.b);
  CHECK(max_cell_diff(sum, convolve(b, Mollifier(1))) < 1e-10);
}

TEST_CASE("mollify residual decreases") {
  Rng rng(51);
  const Grid g(0.0, 1.0 / 32, 64);
  for (int t = 0; t < 5; ++t) {
    const CAtom a = random_atom(rng, g, 2, 16);
    double prev = kInf;
    for (int n = 256; n <= (1 << 16); n *= 2) {
      const MollifiedAtom m = mollify_atom(a, n);
      REQUIRE(m.residual_coeff.has_value());
      CHECK(*m.residual_coeff < prev);
      prev = *m.residual_coeff;
    }
    CHECK(prev < 1e-3);
  }
}
