#pragma once

#include <vector>

#include "ncvharm/hardy.hpp"
#include "ncvharm/kernel.hpp"

namespace ncvharm {

// Log-spaced heights with weights for int_0^inf g(y) y dy ~ sum_k weight_k g(y_k)
// (trapezoid rule in ln y: weight_k = tau_k y_k^2).
struct PoissonGrid {
  std::vector<double> y_nodes;
  std::vector<double> weights;
  double y_min = 0.0;
  double y_max = 0.0;

  static PoissonGrid log_spaced(double y_min, double y_max, std::size_t count);
  // Default range [h/4, 64 * window length].
  static PoissonGrid for_window(double cell_width, double window_length, std::size_t count);
  // Same range with 2 * count - 1 nodes (old nodes are kept).
  PoissonGrid refined() const;
};

namespace poisson {
double kernel(double x, double y);   // (1/pi) y / (x^2 + y^2)
double dx(double x, double y);       // d/dx of kernel
double dy(double x, double y);       // d/dy of kernel
double cdf(double x, double y);      // int_{-inf}^x kernel = 1/2 + arctan(x/y)/pi
double dy_antiderivative(double x, double y);  // int dy dx = -(1/pi) x / (x^2 + y^2)
}  // namespace poisson

// Block column of sqrt(weight_k) d_x P(x - s, y_k) Id_n and sqrt(weight_k) d_y P(x - s, y_k) Id_n,
// so that |T f(x)|^2 equals the discretized G_c(f)(x)^2.
KernelPtr poisson_gradient_kernel(const PoissonGrid& pg, Eigen::Index n = 1);

struct LittlewoodPaleyResult {
  GridFn field;   // G_c(f)(x), PSD matrix per cell
  GridFn scalar;  // pointwise operator norm of the field, 1 x 1
  double l1 = 0.0;  // int tr G_c(f)(x) dx
  double refined_l1 = 0.0;
  double refinement_change = 0.0;  // relative
  bool coarse = false;             // refinement changed the L1 norm by more than 1%
  double mean_norm = 0.0;          // ||int f||, reported since f should be mean zero
};

struct LittlewoodPaleyOptions {
  // Evaluation grid for G_c; defaults to the window of f widened 8 lengths to each side.
  std::optional<Grid> out_grid;
  bool check_refinement = true;
};

// Direct path: exact cell integrals of the kernel derivatives, evaluated at cell midpoints.
LittlewoodPaleyResult littlewood_paley_g(const GridFn& f, const PoissonGrid& pg,
                                         const LittlewoodPaleyOptions& opt = {});

Grid littlewood_paley_default_grid(const Grid& g);

struct GH1Report {
  double g_l1 = 0.0;
  double lambda_sum = 0.0;
  double ratio = 0.0;
  bool coarse = false;
};

GH1Report g_h1_check(const CDecomposition& dec, const PoissonGrid& pg,
                     const LittlewoodPaleyOptions& opt = {});

}  // namespace ncvharm
