#pragma once

#include <Eigen/Dense>
#include <complex>
#include <limits>

namespace ncvharm {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

bool all_finite(const Mat& a);

cplx trace(const Mat& a);

// Schatten p-norm from singular values; p = kInf gives the operator norm.
// Rectangular matrices are accepted.
double schatten_norm(const Mat& a, double p);

// Operator norm of a Hermitian matrix via its eigenvalues.
double hermitian_operator_norm(const Mat& hermitian);

// Largest eigenvalue of the Hermitian part, with negative results clamped to 0.
// Used by oscillation scans where the input is PSD up to rounding.
double psd_top_eigenvalue(const Mat& a);

struct Eigenpair {
  double value;
  Vec vector;
};
Eigenpair top_eigenpair(const Mat& hermitian);

// PSD functional calculus on the Hermitian part (A + A*)/2.
// Throws Error("not Hermitian") / Error("not PSD") beyond tolerance.
Mat psd_power(const Mat& a, double exponent, bool pseudo_inverse);

// Unique PSD square root, or its Moore-Penrose inverse on the range.
Mat sqrt_psd(const Mat& a, bool pseudo_inverse = false);

Mat identity(Eigen::Index n);

}  // namespace ncvharm
