#pragma once

#include <functional>
#include <memory>
#include <string>

#include "ncvharm/matalg.hpp"

namespace ncvharm {

// Matrix-valued kernel K(x, y), defined off the diagonal, of shape out_dim x in_dim.
class Kernel {
 public:
  virtual ~Kernel() = default;

  virtual std::string tag() const = 0;
  virtual Eigen::Index out_dim() const = 0;
  virtual Eigen::Index in_dim() const = 0;
  // Half-width of the band around x = y where eval is not trusted.
  virtual double singular_band() const { return 0.0; }
  // True when K has a non-integrable singularity on the diagonal.
  virtual bool singular() const { return false; }
  virtual bool translation_invariant() const { return false; }
  // Constant c with ||d/dy K(x, y)|| <= c / |x - y|^2; infinity when unknown.
  virtual double decay_constant() const { return kInf; }

  // `out` must already have shape out_dim x in_dim.
  virtual void eval_into(double x, double y, Mat& out) const = 0;
  Mat eval(double x, double y) const;

  // Closed form of int over [a, b] minus (x - delta, x + delta) of K(x, y) dy.
  // With delta = 0 on a singular kernel this is the principal value. Returns false if
  // no closed form exists.
  virtual bool cell_integral(double x, double a, double b, double delta, Mat& out) const;
};

using KernelPtr = std::shared_ptr<const Kernel>;

// 1/(x - y) times the identity of size n.
KernelPtr hilbert_kernel(Eigen::Index n = 1);
// M(x)/(x - y) with M(x) = cos x I + i sin x (cos x sigma_x + sin x sigma_y), unitary 2x2.
KernelPtr rotated_kernel();
Mat rotation_factor(double x);
KernelPtr constant_kernel(const Mat& c);
KernelPtr zero_kernel(Eigen::Index n);
// w(x) (2 eps)^{-1} chi_{|x - y| < eps} Id_n: a band approximation of multiplication by w.
KernelPtr band_multiplier_kernel(std::function<double(double)> w, double eps, Eigen::Index n = 1);

// Kernel of R_m T R_m, evaluated by the defining double integral against phi_m (x) phi_m.
// Singular parents are paired symmetrically around the diagonal (principal value).
// `parent_norm` records ||T||_{L2} for the global bound ||K_m|| <= ||T|| ||phi_m||_2^2.
KernelPtr mollified_kernel(KernelPtr parent, int m, double parent_norm = kInf);

struct MollifiedInfo {
  KernelPtr parent;
  int scale = 0;
  double parent_norm = kInf;
};
// Metadata when `k` was produced by mollified_kernel, else parent == nullptr.
MollifiedInfo mollified_info(const Kernel& k);

}  // namespace ncvharm
