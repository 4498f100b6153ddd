#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ncvharm/hardy.hpp"
#include "ncvharm/kernel.hpp"

namespace ncvharm {

// ---- Hormander constant -------------------------------------------------------------

struct PairSampling {
  double d_min = 1e-2;  // smallest gap |y - y'|
  double d_max = 1e2;   // largest gap
  int per_decade = 2;   // log-uniform gaps; doubling this nests the previous set
  std::vector<double> anchors{0.0};  // positions y'
  int refine_rounds = 2;             // argmax refinement passes
};

struct HormanderOptions {
  PairSampling pairs;
  // Integration reaches |x - y'| <= x_extent * max(gap, kernel scale).
  double x_extent = 1e6;
  double rel_tol = 1e-6;
  int max_refinements = 10;
};

struct HormanderEstimate {
  double lambda = 1.0;
  double c_lambda = 0.0;   // max over sampled pairs of the truncated integral
  double tail_bound = 0.0;  // certified bound on the neglected tail at the argmax (inf if none)
  std::uint64_t pairs_sampled = 0;
  double y = 0.0, y_prime = 0.0;  // argmax pair
  bool converged = true;
  double upper() const { return c_lambda + tail_bound; }
};

struct PairIntegral {
  double value = 0.0;
  double tail_bound = 0.0;
  bool converged = true;
};

// int over |x - y'| >= lambda |y - y'| of ||K(x, y') - K(x, y)||_inf dx, up to the extent.
PairIntegral hormander_pair(const Kernel& k, double y, double y_prime, double lambda,
                            const HormanderOptions& opt = {});

HormanderEstimate hormander_constant(const Kernel& k, double lambda, const HormanderOptions& opt = {});

// ---- Truncated application ----------------------------------------------------------

enum class XRule { gauss4, midpoint };

struct ApplyOptions {
  std::optional<Grid> out_grid;  // defaults to the input grid
  XRule x_rule = XRule::gauss4;
};

// Block matrix of T_delta from cells of `in` to cell averages on `out`:
// rows out_dim per output cell, cols in_dim per input cell.
Mat assemble_operator(const Kernel& k, const Grid& in, const Grid& out, double delta,
                      XRule rule = XRule::gauss4);

// T_delta f: y-cells integrated in closed form when the kernel provides it, otherwise with
// 4-point Gauss nodes dropped inside the band |x - y| < delta.
GridFn apply_kernel(const Kernel& k, const GridFn& f, double delta, const ApplyOptions& opt = {});

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Power iteration on T^* T for the discretized T_delta on `probe`.
NormEstimate l2_operator_norm(const Kernel& k, double delta, const Grid& probe, int max_iter = 200,
                              double rel_tol = 1e-8, std::uint64_t seed = 1);

// R_m T_delta R_m f restricted to `window` (mollify, apply on a widened window, mollify).
GridFn mollified_apply(const Kernel& k, const GridFn& f, int m, double delta, const Grid& window);

// ---- Atom bounds --------------------------------------------------------------------

struct CzAtomReport {
  double near = 0.0;  // ||T a||_1 over lambda I
  double far = 0.0;   // ||T a||_1 over the evaluation window outside lambda I
  double total = 0.0;
  double near_bound = 0.0;  // lambda^{1/2} ||T||
  double far_bound = 0.0;   // C_lambda
  double bound = 0.0;       // max of the two, times (1 + eps)
  bool near_ok = false, far_ok = false, total_ok = false;
  bool pass() const { return near_ok && far_ok && total_ok; }
};

struct CzBounds {
  double lambda = 2.0;
  double c_lambda = 0.0;
  double t_norm = 0.0;
  double eps = 1e-3;
  double window_factor = 64.0;  // evaluation window: center +- window_factor |I|
};

CzAtomReport cz_atom_check(const Kernel& k, double delta, const CAtom& a, const CzBounds& b);

struct DecompositionApply {
  GridFn result;
  double l1 = 0.0;
  double bound = 0.0;  // max{C_lambda, lambda^{1/2} ||T||} sum |lambda_i| (1 + eps)
  bool pass = false;
};

// sum_i lambda_i T(b_i) h_i on `window` (default: target grid padded by window_factor lengths).
DecompositionApply apply_to_decomposition(const Kernel& k, double delta, const CDecomposition& dec,
                                          const CzBounds& b, const std::optional<Grid>& window = {});

// max ||[K(x, y), K(x', y')]||_inf over a deterministic sample; > 0 certifies noncommutativity.
double commutator_witness(const Kernel& k, int samples = 64, std::uint64_t seed = 5);

}  // namespace ncvharm
