#include "ncvharm/matalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "ncvharm/error.hpp"

namespace ncvharm {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kPsdClampTol = 1e-10;
constexpr double kRankTol = 1e-12;

double max_abs_entry(const Mat& a) {
  double m = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) m = std::max(m, std::abs(a(i, j)));
  return m;
}

}  // namespace

bool all_finite(const Mat& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

cplx trace(const Mat& a) { return a.trace(); }

Mat identity(Eigen::Index n) { return Mat::Identity(n, n); }

double schatten_norm(const Mat& a, double p) {
  if (!(p >= 1.0)) throw Error("schatten exponent must be >= 1");
  if (!all_finite(a)) throw Error("non-finite matrix entry");
  if (a.size() == 0) return 0.0;
  if (p == 2.0) return a.norm();
  if (a.size() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& s = svd.singularValues();
  if (std::isinf(p)) return s.size() ? s(0) : 0.0;
  if (p == 1.0) return s.sum();
  const double top = s(0);
  if (top == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) acc += std::pow(s(k) / top, p);
  return top * std::pow(acc, 1.0 / p);
}

double hermitian_operator_norm(const Mat& hermitian) {
  if (hermitian.rows() == 1) return std::abs(hermitian(0, 0).real());
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

double psd_top_eigenvalue(const Mat& a) {
  double top;
  if (a.rows() == 1) {
    top = a(0, 0).real();
  } else if (a.rows() == 2) {
    // Closed form for 2x2 Hermitian matrices; this is the hot path of interval scans.
    const double p = a(0, 0).real(), q = a(1, 1).real();
    const cplx off = 0.5 * (a(0, 1) + std::conj(a(1, 0)));
    const double half = 0.5 * (p - q);
    top = 0.5 * (p + q) + std::sqrt(half * half + std::norm(off));
  } else {
    Mat herm = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(herm, Eigen::EigenvaluesOnly);
    top = es.eigenvalues()(herm.rows() - 1);
  }
  return std::max(top, 0.0);
}

Eigenpair top_eigenpair(const Mat& hermitian) {
  Mat herm = 0.5 * (hermitian + hermitian.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(herm);
  const Eigen::Index last = herm.rows() - 1;
  return {es.eigenvalues()(last), es.eigenvectors().col(last)};
}

Mat psd_power(const Mat& a, double exponent, bool pseudo_inverse) {
  if (a.rows() != a.cols()) throw Error("not square");
  if (!all_finite(a)) throw Error("non-finite matrix entry");
  const double scale = max_abs_entry(a);
  if (scale == 0.0) return Mat::Zero(a.rows(), a.cols());
  if (max_abs_entry(a - a.adjoint()) > kHermitianTol * scale) throw Error("not Hermitian");
  Mat herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(herm);
  Eigen::VectorXd ev = es.eigenvalues();
  const double opnorm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  const double clamp = kPsdClampTol * opnorm;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k) < -clamp) throw Error("not PSD");
    ev(k) = std::max(ev(k), 0.0);
  }
  const double lmax = ev(ev.size() - 1);
  Eigen::VectorXd f(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (pseudo_inverse) {
      f(k) = ev(k) > kRankTol * lmax ? std::pow(ev(k), -exponent) : 0.0;
    } else {
      f(k) = ev(k) > 0.0 ? std::pow(ev(k), exponent) : 0.0;
    }
  }
  const Mat& u = es.eigenvectors();
  Mat out = u * f.cast<cplx>().asDiagonal() * u.adjoint();
  return 0.5 * (out + out.adjoint());
}

Mat sqrt_psd(const Mat& a, bool pseudo_inverse) { return psd_power(a, 0.5, pseudo_inverse); }

}  // namespace ncvharm
