#include "ncvharm/poisson.hpp"

#include <cmath>
#include <numbers>

#include "ncvharm/error.hpp"

namespace ncvharm {

namespace poisson {
using std::numbers::pi;
double kernel(double x, double y) { return y / (pi * (x * x + y * y)); }
double dx(double x, double y) {
  const double r2 = x * x + y * y;
  return -2.0 * x * y / (pi * r2 * r2);
}
double dy(double x, double y) {
  const double r2 = x * x + y * y;
  return (x * x - y * y) / (pi * r2 * r2);
}
double cdf(double x, double y) { return 0.5 + std::atan(x / y) / pi; }
double dy_antiderivative(double x, double y) { return -x / (pi * (x * x + y * y)); }
}  // namespace poisson

PoissonGrid PoissonGrid::log_spaced(double y_min, double y_max, std::size_t count) {
  if (!(y_min > 0.0) || !(y_max > y_min) || count < 2) throw Error("invalid poisson grid");
  PoissonGrid pg;
  pg.y_min = y_min;
  pg.y_max = y_max;
  const double l0 = std::log(y_min), l1 = std::log(y_max);
  const double step = (l1 - l0) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) {
    const double y = k == 0 ? y_min : k + 1 == count ? y_max : std::exp(l0 + step * static_cast<double>(k));
    const double tau = (k == 0 || k + 1 == count) ? 0.5 * step : step;
    pg.y_nodes.push_back(y);
    pg.weights.push_back(tau * y * y);
  }
  return pg;
}

PoissonGrid PoissonGrid::for_window(double h, double window_length, std::size_t count) {
  return log_spaced(h / 4.0, 64.0 * window_length, count);
}

PoissonGrid PoissonGrid::refined() const { return log_spaced(y_min, y_max, 2 * y_nodes.size() - 1); }

namespace {

class PoissonGradientKernel final : public Kernel {
 public:
  PoissonGradientKernel(const PoissonGrid& pg, Eigen::Index n) : pg_(pg), n_(n) {
    for (double w : pg_.weights) root_.push_back(std::sqrt(w));
  }
  std::string tag() const override { return "poisson_gradient"; }
  Eigen::Index out_dim() const override { return 2 * static_cast<Eigen::Index>(pg_.y_nodes.size()) * n_; }
  Eigen::Index in_dim() const override { return n_; }
  bool translation_invariant() const override { return true; }

  void eval_into(double x, double s, Mat& out) const override {
    fill(out, [&](double y) { return poisson::dx(x - s, y); }, [&](double y) { return poisson::dy(x - s, y); });
  }
  bool cell_integral(double x, double a, double b, double delta, Mat& out) const override {
    if (delta > 0.0) return false;
    // int_a^b d_x P(x - s) ds = P(x - a) - P(x - b); same for d_y with its antiderivative.
    fill(out, [&](double y) { return poisson::kernel(x - a, y) - poisson::kernel(x - b, y); },
         [&](double y) { return poisson::dy_antiderivative(x - a, y) - poisson::dy_antiderivative(x - b, y); });
    return true;
  }

 private:
  template <class FX, class FY>
  void fill(Mat& out, FX&& fx, FY&& fy) const {
    out.setZero();
    const Eigen::Index m = static_cast<Eigen::Index>(pg_.y_nodes.size());
    for (Eigen::Index k = 0; k < m; ++k) {
      const double y = pg_.y_nodes[static_cast<std::size_t>(k)];
      const double r = root_[static_cast<std::size_t>(k)];
      const double vx = r * fx(y), vy = r * fy(y);
      for (Eigen::Index c = 0; c < n_; ++c) {
        out(k * n_ + c, c) = vx;
        out((m + k) * n_ + c, c) = vy;
      }
    }
  }

  PoissonGrid pg_;
  std::vector<double> root_;
  Eigen::Index n_;
};

double trace_l1(const GridFn& field) {
  double acc = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) acc += field[i].trace().real();
  return field.grid().cell_width * acc;
}

GridFn g_field(const GridFn& f, const PoissonGrid& pg, const Grid& out) {
  const Grid& g = f.grid();
  const Eigen::Index n = f.cols();
  GridFn field(out, n, n);
  Mat ax(f.rows(), n), ay(f.rows(), n), acc(n, n);
  std::vector<std::size_t> nonzero;
  for (std::size_t j = 0; j < f.size(); ++j)
    if (!f[j].isZero(0.0)) nonzero.push_back(j);
  for (std::size_t i = 0; i < out.num_cells; ++i) {
    const double x = out.mid(i);
    acc.setZero();
    for (std::size_t k = 0; k < pg.y_nodes.size(); ++k) {
      const double y = pg.y_nodes[k];
      ax.setZero();
      ay.setZero();
      for (std::size_t j : nonzero) {
        const double a = g.left(j), b = g.right(j);
        ax += (poisson::kernel(x - a, y) - poisson::kernel(x - b, y)) * f[j];
        ay += (poisson::dy_antiderivative(x - a, y) - poisson::dy_antiderivative(x - b, y)) * f[j];
      }
      acc.noalias() += pg.weights[k] * (ax.adjoint() * ax);
      acc.noalias() += pg.weights[k] * (ay.adjoint() * ay);
    }
    field[i] = sqrt_psd(0.5 * (acc + acc.adjoint()));
  }
  return field;
}

}  // namespace

KernelPtr poisson_gradient_kernel(const PoissonGrid& pg, Eigen::Index n) {
  return std::make_shared<PoissonGradientKernel>(pg, n);
}

Grid littlewood_paley_default_grid(const Grid& g) {
  const std::size_t pad = 8 * g.num_cells;
  return g.widen(pad, pad);
}

LittlewoodPaleyResult littlewood_paley_g(const GridFn& f, const PoissonGrid& pg, const LittlewoodPaleyOptions& opt) {
  const Grid out = opt.out_grid ? *opt.out_grid : littlewood_paley_default_grid(f.grid());
  LittlewoodPaleyResult r;
  r.mean_norm = integrate(f).norm();
  r.field = g_field(f, pg, out);
  r.scalar = GridFn(out, 1, 1);
  for (std::size_t i = 0; i < out.num_cells; ++i)
    r.scalar[i](0, 0) = hermitian_operator_norm(r.field[i]);
  r.l1 = trace_l1(r.field);
  r.refined_l1 = r.l1;
  if (opt.check_refinement) {
    r.refined_l1 = trace_l1(g_field(f, pg.refined(), out));
    const double denom = std::max(std::abs(r.refined_l1), 1e-300);
    r.refinement_change = r.l1 == r.refined_l1 ? 0.0 : std::abs(r.refined_l1 - r.l1) / denom;
    r.coarse = r.refinement_change > 0.01;
  }
  return r;
}

GH1Report g_h1_check(const CDecomposition& dec, const PoissonGrid& pg, const LittlewoodPaleyOptions& opt) {
  GH1Report rep;
  rep.lambda_sum = dec.abs_lambda_sum();
  if (dec.terms.empty()) return rep;
  const LittlewoodPaleyResult lp = littlewood_paley_g(dec.reconstruct(), pg, opt);
  rep.g_l1 = lp.l1;
  rep.coarse = lp.coarse;
  rep.ratio = rep.lambda_sum > 0.0 ? rep.g_l1 / rep.lambda_sum : 0.0;
  return rep;
}

}  // namespace ncvharm
