#include "ncvharm/kernel.hpp"

#include <cmath>

#include "ncvharm/error.hpp"
#include "ncvharm/mollifier.hpp"
#include "ncvharm/quadrature.hpp"

namespace ncvharm {

Mat Kernel::eval(double x, double y) const {
  Mat out(out_dim(), in_dim());
  eval_into(x, y, out);
  return out;
}

bool Kernel::cell_integral(double, double, double, double, Mat&) const { return false; }

namespace {

// int over [a, b] minus (x - delta, x + delta) of dy / (x - y).
double hilbert_cell(double x, double a, double b, double delta) {
  if (delta <= 0.0) {
    if (x == a || x == b) throw Error("evaluation point on a cell edge");
    return std::log(std::abs(x - a)) - std::log(std::abs(x - b));
  }
  double acc = 0.0;
  const double lhi = std::min(b, x - delta);
  if (lhi > a) acc += std::log(x - a) - std::log(x - lhi);
  const double rlo = std::max(a, x + delta);
  if (b > rlo) acc += std::log(rlo - x) - std::log(b - x);
  return acc;
}

// Length of [a, b] minus (x - delta, x + delta).
double outside_band(double x, double a, double b, double delta) {
  double len = 0.0;
  const double lhi = std::min(b, x - delta);
  if (lhi > a) len += lhi - a;
  const double rlo = std::max(a, x + delta);
  if (b > rlo) len += b - rlo;
  return len;
}

class HilbertKernel final : public Kernel {
 public:
  explicit HilbertKernel(Eigen::Index n) : n_(n) {}
  std::string tag() const override { return "hilbert"; }
  Eigen::Index out_dim() const override { return n_; }
  Eigen::Index in_dim() const override { return n_; }
  bool singular() const override { return true; }
  bool translation_invariant() const override { return true; }
  double decay_constant() const override { return 1.0; }
  void eval_into(double x, double y, Mat& out) const override {
    out.setZero();
    out.diagonal().setConstant(1.0 / (x - y));
  }
  bool cell_integral(double x, double a, double b, double delta, Mat& out) const override {
    out.setZero();
    out.diagonal().setConstant(hilbert_cell(x, a, b, delta));
    return true;
  }

 private:
  Eigen::Index n_;
};

// Writes s * M(x) into out without temporaries; M(x) = [[c, s^2 + i s c], [-s^2 + i s c, c]].
void write_rotation(double x, double scale, Mat& out) {
  const double c = std::cos(x), s = std::sin(x);
  out(0, 0) = scale * c;
  out(1, 1) = scale * c;
  out(0, 1) = scale * cplx(s * s, s * c);
  out(1, 0) = scale * cplx(-s * s, s * c);
}

class RotatedKernel final : public Kernel {
 public:
  std::string tag() const override { return "rotated"; }
  Eigen::Index out_dim() const override { return 2; }
  Eigen::Index in_dim() const override { return 2; }
  bool singular() const override { return true; }
  double decay_constant() const override { return 1.0; }
  void eval_into(double x, double y, Mat& out) const override { write_rotation(x, 1.0 / (x - y), out); }
  bool cell_integral(double x, double a, double b, double delta, Mat& out) const override {
    write_rotation(x, hilbert_cell(x, a, b, delta), out);
    return true;
  }
};

class ConstantKernel final : public Kernel {
 public:
  explicit ConstantKernel(Mat c) : c_(std::move(c)) {}
  std::string tag() const override { return c_.isZero(0.0) ? "zero" : "constant"; }
  Eigen::Index out_dim() const override { return c_.rows(); }
  Eigen::Index in_dim() const override { return c_.cols(); }
  bool translation_invariant() const override { return true; }
  double decay_constant() const override { return 0.0; }
  void eval_into(double, double, Mat& out) const override { out = c_; }
  bool cell_integral(double x, double a, double b, double delta, Mat& out) const override {
    out = c_ * outside_band(x, a, b, delta);
    return true;
  }

 private:
  Mat c_;
};

class BandMultiplierKernel final : public Kernel {
 public:
  BandMultiplierKernel(std::function<double(double)> w, double eps, Eigen::Index n)
      : w_(std::move(w)), eps_(eps), n_(n) {
    if (!(eps > 0.0)) throw Error("band half-width must be positive");
  }
  std::string tag() const override { return "band_multiplier"; }
  Eigen::Index out_dim() const override { return n_; }
  Eigen::Index in_dim() const override { return n_; }
  void eval_into(double x, double y, Mat& out) const override {
    out.setZero();
    if (std::abs(x - y) < eps_) out.diagonal().setConstant(w_(x) / (2.0 * eps_));
  }
  bool cell_integral(double x, double a, double b, double delta, Mat& out) const override {
    // Overlap of [a, b] with the band (x - eps, x + eps), minus the truncation band.
    const double lo = std::max(a, x - eps_), hi = std::min(b, x + eps_);
    const double len = hi > lo ? outside_band(x, lo, hi, delta) : 0.0;
    out.setZero();
    out.diagonal().setConstant(w_(x) * len / (2.0 * eps_));
    return true;
  }

 private:
  std::function<double(double)> w_;
  double eps_;
  Eigen::Index n_;
};

constexpr int kPanelPoints = 10;

class MollifiedKernel final : public Kernel {
 public:
  MollifiedKernel(KernelPtr parent, int m, double parent_norm)
      : parent_(std::move(parent)), phi_(m), parent_norm_(parent_norm) {}

  std::string tag() const override { return "mollified"; }
  Eigen::Index out_dim() const override { return parent_->out_dim(); }
  Eigen::Index in_dim() const override { return parent_->in_dim(); }
  bool translation_invariant() const override { return parent_->translation_invariant(); }
  double decay_constant() const override { return parent_->decay_constant(); }

  const KernelPtr& parent() const { return parent_; }
  int scale() const { return phi_.scale; }
  double parent_norm() const { return parent_norm_; }

  void eval_into(double x, double y, Mat& out) const override {
    const double d = x - y;
    const double r = 2.0 / phi_.scale;
    Mat tmp(out_dim(), in_dim()), tmp2(out_dim(), in_dim()), inner(out_dim(), in_dim());
    out.setZero();
    // Density in the difference variable w = u - v at which the parent is singular (w = d).
    auto g = [&](double w, Mat& o) {
      // A node rounding onto the singular point is a null set; drop it.
      if (parent_->singular() && d - w == 0.0) {
        o.setZero();
        return;
      }
      if (parent_->translation_invariant()) {
        const double wt = phi_.autocorrelation(w);
        // Zero weight also covers w rounding onto the singular point at a support edge.
        if (wt == 0.0) {
          o.setZero();
          return;
        }
        parent_->eval_into(d - w, 0.0, o);
        o *= wt;
        return;
      }
      const double vlo = std::max(-1.0 / phi_.scale, -1.0 / phi_.scale - w);
      const double vhi = std::min(1.0 / phi_.scale, 1.0 / phi_.scale - w);
      o.setZero();
      if (!(vhi > vlo)) return;
      const GaussRule& rule = gauss_legendre(kPanelPoints);
      const double half = 0.5 * (vhi - vlo), mid = 0.5 * (vhi + vlo);
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double v = mid + half * rule.nodes[k];
        const double yv = y - v, xv = yv + (d - w);
        if (xv == yv) continue;
        parent_->eval_into(xv, yv, inner);
        o += (half * rule.weights[k] * phi_(v + w) * phi_(v)) * inner;
      }
    };
    auto panel = [&](auto&& fn, double a, double b) {
      const GaussRule& rule = gauss_legendre(kPanelPoints);
      const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        fn(mid + half * rule.nodes[k], tmp);
        out += (half * rule.weights[k]) * tmp;
      }
    };
    // Integrate g over [a, b] (inside one smooth piece), graded towards d when it is near.
    auto graded = [&](double a, double b) {
      if (!(b > a)) return;
      if (parent_->singular() && (d <= a || d >= b)) {
        const auto br = graded_breaks(a, b, d, 1e-14 * (b - a), 2);
        for (std::size_t k = 0; k + 1 < br.size(); ++k) panel(g, br[k], br[k + 1]);
      } else {
        for (int k = 0; k < 4; ++k) panel(g, a + (b - a) * k / 4.0, a + (b - a) * (k + 1) / 4.0);
      }
    };
    if (!parent_->singular() || d <= -r || d >= r) {
      graded(-r, 0.0);
      graded(0.0, r);
      return;
    }
    // Principal value: pair w = d + s with w = d - s for s in [0, rho].
    const double rho = std::min(d + r, r - d);
    auto paired = [&](double s, Mat& o) {
      g(d + s, o);
      g(d - s, tmp2);
      o += tmp2;
    };
    const double kink = std::abs(d);
    std::vector<double> sb{0.0};
    if (kink > 0.0 && kink < rho) sb.push_back(kink);
    sb.push_back(rho);
    for (std::size_t k = 0; k + 1 < sb.size(); ++k)
      for (int u = 0; u < 4; ++u)
        panel(paired, sb[k] + (sb[k + 1] - sb[k]) * u / 4.0, sb[k] + (sb[k + 1] - sb[k]) * (u + 1) / 4.0);
    // One-sided remainder away from the diagonal, split at the kink w = 0.
    double a, b;
    if (d + rho < r) {
      a = d + rho;
      b = r;
    } else {
      a = -r;
      b = d - rho;
    }
    if (a < 0.0 && b > 0.0) {
      graded(a, 0.0);
      graded(0.0, b);
    } else {
      graded(a, b);
    }
  }

 private:
  KernelPtr parent_;
  Mollifier phi_;
  double parent_norm_;
};

}  // namespace

Mat rotation_factor(double x) {
  Mat m(2, 2);
  write_rotation(x, 1.0, m);
  return m;
}

KernelPtr hilbert_kernel(Eigen::Index n) { return std::make_shared<HilbertKernel>(n); }
KernelPtr rotated_kernel() { return std::make_shared<RotatedKernel>(); }
KernelPtr constant_kernel(const Mat& c) { return std::make_shared<ConstantKernel>(c); }
KernelPtr zero_kernel(Eigen::Index n) { return std::make_shared<ConstantKernel>(Mat::Zero(n, n)); }
KernelPtr band_multiplier_kernel(std::function<double(double)> w, double eps, Eigen::Index n) {
  return std::make_shared<BandMultiplierKernel>(std::move(w), eps, n);
}

KernelPtr mollified_kernel(KernelPtr parent, int m, double parent_norm) {
  if (!parent) throw Error("null kernel");
  if (m < 1) throw Error("mollifier scale must be >= 1");
  return std::make_shared<MollifiedKernel>(std::move(parent), m, parent_norm);
}

MollifiedInfo mollified_info(const Kernel& k) {
  if (const auto* mk = dynamic_cast<const MollifiedKernel*>(&k))
    return {mk->parent(), mk->scale(), mk->parent_norm()};
  return {};
}

}  // namespace ncvharm
