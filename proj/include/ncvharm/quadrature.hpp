#pragma once

#include <vector>

namespace ncvharm {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre rule with n points (cached, thread-safe after first use).
const GaussRule& gauss_legendre(int n);

// Integral of f over [a, b] with an n-point Gauss rule.
template <class F>
double gauss_integrate(F&& f, double a, double b, int n) {
  const GaussRule& r = gauss_legendre(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double acc = 0.0;
  for (std::size_t k = 0; k < r.nodes.size(); ++k) acc += r.weights[k] * f(mid + half * r.nodes[k]);
  return half * acc;
}

// Panel boundaries on [a, b] refined geometrically towards `focus`
// (which must lie outside the open interval), with ratio 1/2 and
// `uniform` equal sub-panels per geometric shell.
std::vector<double> graded_breaks(double a, double b, double focus, double min_gap, int uniform = 1);

}  // namespace ncvharm
