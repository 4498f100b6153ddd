#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "ncvharm/error.hpp"
#include "ncvharm/matalg.hpp"
#include "ncvharm/sampling.hpp"

using namespace ncvharm;

namespace {
// Independent oracle: singular values from the eigenvalues of A^* A.
Eigen::VectorXd oracle_singular_values(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a.adjoint() * a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
}
}  // namespace

TEST_CASE("schatten norm closed forms") {
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 4.0;
  CHECK(schatten_norm(d, 2.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(schatten_norm(d, kInf) == doctest::Approx(4.0));
  CHECK(schatten_norm(d, 1.0) == doctest::Approx(7.0));
  CHECK(schatten_norm(identity(3), 1.0) == doctest::Approx(3.0));
}

TEST_CASE("schatten norm errors") {
  CHECK_THROWS_AS(schatten_norm(identity(2), 0.5), Error);
  Mat bad = identity(2);
  bad(0, 1) = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK_THROWS_AS(schatten_norm(bad, 2.0), Error);
}

TEST_CASE("schatten norm against eigenvalue oracle") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const Mat a = random_mat(rng, 4, 4);
    const Eigen::VectorXd s = oracle_singular_values(a);
    CHECK(std::abs(schatten_norm(a, 1.0) - s.sum()) <= 1e-10 * s.sum());
    CHECK(std::abs(schatten_norm(a, kInf) - s.maxCoeff()) <= 1e-10 * s.maxCoeff());
    const double p3 = std::pow(s.array().pow(3.0).sum(), 1.0 / 3.0);
    CHECK(std::abs(schatten_norm(a, 3.0) - p3) <= 1e-10 * p3);
  }
}

TEST_CASE("schatten norm properties") {
  Rng rng(12);
  const double ps[] = {1.0, 1.5, 2.0, 3.0, 7.0, kInf};
  for (int t = 0; t < 30; ++t) {
    const Mat a = random_mat(rng, 3, 3);
    double prev = kInf;
    for (double p : ps) {
      const double v = schatten_norm(a, p);
      CHECK(std::abs(v - schatten_norm(a.adjoint(), p)) <= 1e-10 * v);
      CHECK(v <= prev * (1.0 + 1e-12));
      prev = v;
    }
  }
}

TEST_CASE("sqrt_psd basics") {
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const Mat r = sqrt_psd(d);
  CHECK(std::abs(r(0, 0) - 2.0) < 1e-14);
  CHECK(std::abs(r(1, 1) - 3.0) < 1e-14);
  CHECK(std::abs(r(0, 1)) < 1e-14);
  CHECK(sqrt_psd(Mat::Zero(3, 3), true).isZero(0.0));
  const Mat pinv = sqrt_psd(d, true);
  CHECK(std::abs(pinv(0, 0) - 0.5) < 1e-14);
}

TEST_CASE("sqrt_psd reconstruction and pseudo-inverse") {
  Rng rng(13);
  for (int t = 0; t < 30; ++t) {
    const Mat a = random_psd(rng, 4);
    const Mat r = sqrt_psd(a);
    CHECK((r * r - a).norm() < 1e-9 * a.norm());
    const Mat ri = sqrt_psd(a, true);
    CHECK((r * ri - identity(4)).norm() < 1e-8);
  }
  // Rank-deficient: pseudo-inverse acts on the range only.
  Vec v = random_mat(rng, 3, 1).col(0);
  const Mat rank1 = v * v.adjoint();
  const Mat ri = sqrt_psd(rank1, true);
  const Mat p = ri * sqrt_psd(rank1);
  CHECK((p - v * v.adjoint() / v.squaredNorm()).norm() < 1e-10);
}

TEST_CASE("sqrt_psd errors") {
  Mat nh = identity(2);
  nh(0, 1) = 1.0;
  CHECK_THROWS_WITH_AS(sqrt_psd(nh), "not Hermitian", Error);
  Mat neg = -identity(2);
  CHECK_THROWS_WITH_AS(sqrt_psd(neg), "not PSD", Error);
  Mat tiny = identity(2);
  tiny(1, 1) = -1e-12;  // within the clamp tolerance
  CHECK_NOTHROW(sqrt_psd(tiny));
}

TEST_CASE("trace linearity and cyclicity") {
  Rng rng(14);
  for (int t = 0; t < 20; ++t) {
    const Mat a = random_mat(rng, 3, 3), b = random_mat(rng, 3, 3);
    const cplx s(0.3, -1.2);
    const cplx lhs = trace(a + s * b), rhs = trace(a) + s * trace(b);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (std::abs(lhs) + 1.0));
    const cplx ab = trace(a * b), ba = trace(b * a);
    CHECK(std::abs(ab - ba) <= 1e-10 * std::abs(ab));
    CHECK(trace(a.adjoint() * a).real() >= 0.0);
  }
}

TEST_CASE("psd top eigenvalue matches solver") {
  Rng rng(15);
  for (int n = 1; n <= 4; ++n) {
    const Mat a = random_psd(rng, n);
    Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
    CHECK(psd_top_eigenvalue(a) == doctest::Approx(es.eigenvalues()(n - 1)).epsilon(1e-12));
  }
}
