#include "ncvharm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "ncvharm/error.hpp"

namespace ncvharm {

namespace {

GaussRule build_rule(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int p, int q) { return r.nodes[p] < r.nodes[q]; });
  GaussRule s;
  for (int i : order) {
    s.nodes.push_back(r.nodes[i]);
    s.weights.push_back(r.weights[i]);
  }
  return s;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw Error("gauss rule needs n >= 1");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, n == 1 ? GaussRule{{0.0}, {2.0}} : build_rule(n)).first;
  return it->second;
}

std::vector<double> graded_breaks(double a, double b, double focus, double min_gap, int uniform) {
  if (!(b > a)) return {a, b};
  std::vector<double> shells;
  const bool left = focus <= a;
  const double near = left ? a : b, far = left ? b : a;
  const double d0 = std::abs(near - focus), d1 = std::abs(far - focus);
  // Distances from the focus: d0 * 2^k until d1, but at least min_gap from the focus.
  std::vector<double> dist;
  double start = std::max(d0, 0.0);
  if (start < min_gap) {
    dist.push_back(start);
    start = std::min(min_gap, d1);
  }
  for (double d = start; d < d1; d = (d > 0 ? 2.0 * d : min_gap)) dist.push_back(d);
  dist.push_back(d1);
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < dist.size(); ++k) {
    const double lo = dist[k], hi = dist[k + 1];
    for (int u = 0; u < uniform; ++u) out.push_back(lo + (hi - lo) * u / uniform);
  }
  out.push_back(d1);
  for (double& d : out) d = left ? focus + d : focus - d;
  out.front() = near;
  out.back() = far;
  if (!left) std::reverse(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace ncvharm
