#include "ncvharm/czo.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ncvharm/error.hpp"
#include "ncvharm/mollifier.hpp"
#include "ncvharm/quadrature.hpp"

namespace ncvharm {

namespace {

double sup_norm(const Mat& d) {
  if (d.size() == 1) return std::abs(d(0, 0));
  if (d.cols() == 1) return d.norm();
  return std::sqrt(psd_top_eigenvalue(d.adjoint() * d));
}

// Extra reach of the kernel beyond x - y (support radius of the mollifier pair).
double kernel_spread(const Kernel& k) {
  const MollifiedInfo info = mollified_info(k);
  return info.parent ? 2.0 / info.scale : 0.0;
}

}  // namespace

PairIntegral hormander_pair(const Kernel& k, double y, double yp, double lambda, const HormanderOptions& opt) {
  if (!(lambda >= 1.0)) throw Error("lambda must be >= 1");
  const double gap = std::abs(y - yp);
  PairIntegral out;
  if (gap == 0.0) return out;
  const double spread = kernel_spread(k);
  const double start = lambda * gap;
  const double reach = opt.x_extent * std::max(gap, spread);
  if (!(reach > start)) throw Error("integration extent below the excluded region");
  // Geometric shells in t = |x - y'| on both sides of y'.
  std::vector<double> shells{start};
  while (shells.back() < reach) shells.push_back(std::min(2.0 * shells.back(), reach));
  // A kink or singular point at x = y, and the mollifier edges, are panel breaks.
  std::vector<double> extra{gap, gap + spread, std::max(0.0, gap - spread), spread};
  for (double e : extra)
    if (e > start && e < reach) shells.push_back(e);
  std::sort(shells.begin(), shells.end());
  shells.erase(std::unique(shells.begin(), shells.end()), shells.end());

  Mat a(k.out_dim(), k.in_dim()), b(k.out_dim(), k.in_dim());
  auto integrand = [&](double x) {
    k.eval_into(x, yp, a);
    k.eval_into(x, y, b);
    a -= b;
    return sup_norm(a);
  };
  auto level = [&](int lv) {
    const int sub = 1 << lv;
    double acc = 0.0;
    for (int side = -1; side <= 1; side += 2) {
      for (std::size_t s = 0; s + 1 < shells.size(); ++s) {
        const double t0 = shells[s], t1 = shells[s + 1];
        for (int u = 0; u < sub; ++u) {
          const double lo = t0 + (t1 - t0) * u / sub, hi = t0 + (t1 - t0) * (u + 1) / sub;
          acc += gauss_integrate([&](double t) { return integrand(yp + side * t); }, lo, hi, 8);
        }
      }
    }
    return acc;
  };
  double prev = level(0);
  out.converged = false;
  for (int lv = 1; lv <= opt.max_refinements; ++lv) {
    const double cur = level(lv);
    const bool done = std::abs(cur - prev) <= opt.rel_tol * std::abs(cur);
    prev = cur;
    if (done) {
      out.converged = true;
      break;
    }
  }
  out.value = prev;
  const double c = k.decay_constant();
  if (c == 0.0)
    out.tail_bound = 0.0;
  else if (std::isfinite(c) && reach > gap + spread)
    out.tail_bound = 2.0 * c * gap / (reach - gap - spread);
  else
    out.tail_bound = kInf;
  return out;
}

HormanderEstimate hormander_constant(const Kernel& k, double lambda, const HormanderOptions& opt) {
  if (!(lambda >= 1.0)) throw Error("lambda must be >= 1");
  const PairSampling& ps = opt.pairs;
  if (!(ps.d_max >= ps.d_min) || !(ps.d_min > 0.0) || ps.per_decade < 1) throw Error("invalid pair sampling");
  HormanderEstimate est;
  est.lambda = lambda;
  est.c_lambda = -1.0;
  double best_gap = ps.d_min;
  double best_anchor = ps.anchors.empty() ? 0.0 : ps.anchors.front();
  auto consider = [&](double anchor, double gap) {
    for (int sign = -1; sign <= 1; sign += 2) {
      const double y = anchor + sign * gap;
      const PairIntegral pi = hormander_pair(k, y, anchor, lambda, opt);
      ++est.pairs_sampled;
      est.converged = est.converged && pi.converged;
      if (pi.value > est.c_lambda) {
        est.c_lambda = pi.value;
        est.tail_bound = pi.tail_bound;
        est.y = y;
        est.y_prime = anchor;
        best_gap = gap;
        best_anchor = anchor;
      }
    }
  };
  const double decades = std::log10(ps.d_max / ps.d_min);
  const int steps = std::max(1, static_cast<int>(std::ceil(decades * ps.per_decade - 1e-9)));
  const double step = decades / steps;
  std::vector<double> anchors = ps.anchors.empty() ? std::vector<double>{0.0} : ps.anchors;
  for (double anchor : anchors)
    for (int s = 0; s <= steps; ++s) consider(anchor, ps.d_min * std::pow(10.0, step * s));
  double width = step;
  for (int r = 0; r < ps.refine_rounds; ++r) {
    width *= 0.5;
    const double g0 = best_gap, a0 = best_anchor;
    consider(a0, g0 * std::pow(10.0, width));
    consider(a0, g0 * std::pow(10.0, -width));
  }
  return est;
}

// ---- Application --------------------------------------------------------------------

namespace {

struct XNodes {
  std::vector<double> offset;  // fraction of the cell in [0, 1]
  std::vector<double> weight;  // sum to 1
};

XNodes x_nodes(XRule rule) {
  XNodes n;
  if (rule == XRule::midpoint) {
    n.offset = {0.5};
    n.weight = {1.0};
    return n;
  }
  const GaussRule& g = gauss_legendre(4);
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    n.offset.push_back(0.5 * (g.nodes[k] + 1.0));
    n.weight.push_back(0.5 * g.weights[k]);
  }
  return n;
}

class BlockBuilder {
 public:
  BlockBuilder(const Kernel& k, const Grid& in, const Grid& out, double delta, XRule rule)
      : k_(k), in_(in), out_(out), delta_(delta), nodes_(x_nodes(rule)),
        tmp_(k.out_dim(), k.in_dim()), acc_(k.out_dim(), k.in_dim()) {
    if (k.singular() && delta < k.singular_band()) throw Error("truncation below the singular band");
    if (k.singular() && delta == 0.0 && !k.cell_integral(out.mid(0), in.left(0), in.right(0), 0.0, tmp_))
      throw Error("principal value needs a closed-form cell integral");
    ti_ = k.translation_invariant() && in.same_lattice(out);
    if (ti_) {
      cache_.resize(in.num_cells + out.num_cells);
      have_.assign(cache_.size(), false);
    }
  }

  const Mat& block(std::size_t i, std::size_t j) {
    if (!ti_) {
      compute(i, j, acc_);
      return acc_;
    }
    // Blocks depend only on the lattice offset between the cells; i - j shifted to be >= 0.
    const std::size_t slot = i + in_.num_cells - 1 - j;
    if (!have_[slot]) {
      cache_[slot].resize(k_.out_dim(), k_.in_dim());
      compute(i, j, cache_[slot]);
      have_[slot] = true;
    }
    return cache_[slot];
  }

 private:
  void compute(std::size_t i, std::size_t j, Mat& dst) {
    dst.setZero();
    const double a = in_.left(j), b = in_.right(j);
    const double xl = out_.left(i), h = out_.cell_width;
    const GaussRule& gy = gauss_legendre(4);
    for (std::size_t n = 0; n < nodes_.offset.size(); ++n) {
      const double x = xl + nodes_.offset[n] * h;
      if (k_.cell_integral(x, a, b, delta_, tmp_)) {
        dst += nodes_.weight[n] * tmp_;
        continue;
      }
      const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      for (std::size_t q = 0; q < gy.nodes.size(); ++q) {
        const double y = mid + half * gy.nodes[q];
        if (std::abs(x - y) < delta_) continue;
        if (k_.singular() && x == y) continue;
        k_.eval_into(x, y, tmp_);
        dst += (nodes_.weight[n] * half * gy.weights[q]) * tmp_;
      }
    }
  }

  const Kernel& k_;
  Grid in_, out_;
  double delta_;
  XNodes nodes_;
  Mat tmp_, acc_;
  bool ti_ = false;
  std::vector<Mat> cache_;
  std::vector<bool> have_;
};

}  // namespace

Mat assemble_operator(const Kernel& k, const Grid& in, const Grid& out, double delta, XRule rule) {
  BlockBuilder bb(k, in, out, delta, rule);
  const Eigen::Index r = k.out_dim(), c = k.in_dim();
  Mat a(static_cast<Eigen::Index>(out.num_cells) * r, static_cast<Eigen::Index>(in.num_cells) * c);
  for (std::size_t i = 0; i < out.num_cells; ++i)
    for (std::size_t j = 0; j < in.num_cells; ++j)
      a.block(static_cast<Eigen::Index>(i) * r, static_cast<Eigen::Index>(j) * c, r, c) = bb.block(i, j);
  return a;
}

GridFn apply_kernel(const Kernel& k, const GridFn& f, double delta, const ApplyOptions& opt) {
  if (f.rows() != k.in_dim()) throw Error("dim mismatch");
  const Grid out_grid = opt.out_grid ? *opt.out_grid : f.grid();
  BlockBuilder bb(k, f.grid(), out_grid, delta, opt.x_rule);
  GridFn out(out_grid, k.out_dim(), f.cols());
  std::vector<std::size_t> nonzero;
  for (std::size_t j = 0; j < f.size(); ++j)
    if (!f[j].isZero(0.0)) nonzero.push_back(j);
  for (std::size_t i = 0; i < out_grid.num_cells; ++i)
    for (std::size_t j : nonzero) out[i].noalias() += bb.block(i, j) * f[j];
  return out;
}

NormEstimate l2_operator_norm(const Kernel& k, double delta, const Grid& probe, int max_iter, double rel_tol,
                              std::uint64_t seed) {
  const Mat a = assemble_operator(k, probe, probe, delta);
  NormEstimate est;
  if (a.isZero(0.0)) {
    est.converged = true;
    return est;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Vec v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(nd(rng), nd(rng));
  v.normalize();
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Vec av = a * v;
    const double val = av.norm();
    Vec w = a.adjoint() * av;
    est.iterations = it;
    est.value = val;
    if (w.norm() == 0.0) {
      est.converged = true;
      break;
    }
    v = w / w.norm();
    if (it > 1 && std::abs(val - prev) <= rel_tol * val) {
      est.converged = true;
      break;
    }
    prev = val;
  }
  return est;
}

GridFn mollified_apply(const Kernel& k, const GridFn& f, int m, double delta, const Grid& window) {
  const Mollifier phi(m);
  const std::size_t pad = static_cast<std::size_t>(std::ceil(1.0 / (m * window.cell_width) - 1e-12));
  const Grid wide = window.widen(pad + 1, pad + 1);
  const GridFn rf = convolve(f, phi);
  ApplyOptions o;
  o.out_grid = wide;
  const GridFn trf = apply_kernel(k, rf, delta, o);
  return crop(convolve(trf, phi), window);
}

CzAtomReport cz_atom_check(const Kernel& k, double delta, const CAtom& a, const CzBounds& bd) {
  const Grid& g = a.b.grid();
  const double len = a.I.length();
  const Grid window = g.cover({a.I.center() - bd.window_factor * len, a.I.center() + bd.window_factor * len});
  ApplyOptions o;
  o.out_grid = window;
  const GridFn ta = right_multiply(apply_kernel(k, a.b, delta, o), a.h);
  const Interval near = a.I.dilate(bd.lambda);
  CzAtomReport r;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    const double fr = cell_fraction(window, i, near);
    const double v = window.cell_width * schatten_norm(ta[i], 1.0);
    r.near += fr * v;
    r.far += (1.0 - fr) * v;
  }
  r.total = r.near + r.far;
  r.near_bound = std::sqrt(bd.lambda) * bd.t_norm;
  r.far_bound = bd.c_lambda;
  r.bound = std::max(r.near_bound, r.far_bound) * (1.0 + bd.eps);
  r.near_ok = r.near <= r.near_bound * (1.0 + bd.eps);
  r.far_ok = r.far <= r.far_bound * (1.0 + bd.eps);
  r.total_ok = r.total <= r.bound;
  return r;
}

DecompositionApply apply_to_decomposition(const Kernel& k, double delta, const CDecomposition& dec,
                                          const CzBounds& bd, const std::optional<Grid>& window) {
  DecompositionApply out;
  const Grid& tg = dec.target_grid;
  const double len = tg.window().length();
  const Grid w = window ? *window
                        : tg.cover({tg.origin - bd.window_factor * len, tg.end() + bd.window_factor * len});
  const Eigen::Index cols = dec.terms.empty() ? k.in_dim() : dec.terms.front().atom.h.cols();
  out.result = GridFn(w, k.out_dim(), cols);
  ApplyOptions o;
  o.out_grid = w;
  for (const auto& t : dec.terms)
    out.result += t.lambda * right_multiply(apply_kernel(k, t.atom.b, delta, o), t.atom.h);
  out.l1 = l1_norm(out.result);
  const double c = std::max(bd.c_lambda, std::sqrt(bd.lambda) * bd.t_norm);
  out.bound = c * dec.abs_lambda_sum() * (1.0 + bd.eps);
  out.pass = out.l1 <= out.bound;
  return out;
}

double commutator_witness(const Kernel& k, int samples, std::uint64_t seed) {
  if (k.out_dim() != k.in_dim()) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  Mat p(k.out_dim(), k.in_dim()), q(k.out_dim(), k.in_dim());
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double x = u(rng), y = u(rng), x2 = u(rng), y2 = u(rng);
    if (std::abs(x - y) < 1e-3 || std::abs(x2 - y2) < 1e-3) continue;
    k.eval_into(x, y, p);
    k.eval_into(x2, y2, q);
    best = std::max(best, sup_norm(p * q - q * p));
  }
  return best;
}

}  // namespace ncvharm
