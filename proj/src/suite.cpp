#include "ncvharm/suite.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include "ncvharm/bmo.hpp"
#include "ncvharm/czo.hpp"
#include "ncvharm/fixtures.hpp"
#include "ncvharm/mollifier.hpp"
#include "ncvharm/parallel.hpp"
#include "ncvharm/poisson.hpp"
#include "ncvharm/quadrature.hpp"
#include "ncvharm/sampling.hpp"

namespace ncvharm {

// ---- Configuration ------------------------------------------------------------------

const std::map<std::string, double>& tolerance_defaults() {
  static const std::map<std::string, double> t{
      {"bmo_rel", 1e-10},
      {"contraction", 1e-10},
      {"duality", 1e-8},
      {"extremal", 1e-8},
      {"pairing_constant", 1e-12},
      {"garnett_constant", 2.0 * std::sqrt(6.0)},
      {"garnett_slack", 1e-9},
      {"meyer_recon", 1e-10},
      {"meyer_slack", 0.01},
      {"decompose_recon", 1e-9},
      {"molecule_constant", fixtures::kMoleculeConstant},
      {"mollify_recon", 1e-10},
      {"hormander_anchor", 1e-4},
      {"cz_eps", 1e-3},
      {"independence", 1e-6},
      {"ladder_ratio", 0.05},
      {"lipschitz_slack", 1e-6},
      {"mollified_hormander", fixtures::kMollifiedHormander},
      {"norm_regression", 1e-9},
      {"poisson_mass", 1e-10},
      {"lp_refine", 0.01},
      {"lp_kernel_path", 1e-6},
      {"lp_constant", fixtures::kLittlewoodPaleyConstant},
      {"lp_regression", 1e-9},
      {"lp_scaling", 1e-10},
  };
  return t;
}

double SuiteConfig::tol(const std::string& key) const {
  if (auto it = tolerances.find(key); it != tolerances.end()) return it->second;
  return tolerance_defaults().at(key);
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> s{"bmo", "atoms", "garnett", "duality", "cz", "lp"};
  return s;
}

namespace {

const std::set<std::string> kConfigKeys{"suite", "seed", "n", "corpus", "grid", "tolerances", "out", "dump", "manifest"};

template <class T>
T require(const json& j, const char* key, bool (json::*is)() const noexcept) {
  const json& v = j.at(key);
  if (!(v.*is)()) throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  return v.get<T>();
}

}  // namespace

SuiteConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!kConfigKeys.count(k)) throw ConfigError("unknown config field '" + k + "'");
  SuiteConfig c;
  if (j.contains("suite")) c.suite = require<std::string>(j, "suite", &json::is_string);
  if (j.contains("seed")) c.seed = require<std::uint64_t>(j, "seed", &json::is_number_unsigned);
  if (j.contains("n")) {
    const auto n = require<std::int64_t>(j, "n", &json::is_number_integer);
    if (n < 1 || n > 8) throw ConfigError("config field 'n' must lie in [1, 8]");
    c.n = static_cast<int>(n);
  }
  if (j.contains("corpus")) {
    const auto k = require<std::int64_t>(j, "corpus", &json::is_number_integer);
    if (k < 1) throw ConfigError("config field 'corpus' must be positive");
    c.corpus = static_cast<std::size_t>(k);
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (!g.is_object() || !g.contains("origin") || !g.contains("cell_width") || !g.contains("num_cells") ||
        !g.at("origin").is_number() || !g.at("cell_width").is_number() || !g.at("num_cells").is_number_integer())
      throw ConfigError("config field 'grid' needs numeric origin, cell_width and integer num_cells");
    const double h = g.at("cell_width").get<double>();
    const auto cells = g.at("num_cells").get<std::int64_t>();
    if (!(h > 0.0) || cells < 8) throw ConfigError("config grid needs cell_width > 0 and cells >= 8");
    c.grid = Grid(g.at("origin").get<double>(), h, static_cast<std::size_t>(cells));
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) throw ConfigError("config field 'tolerances' must be an object");
    for (const auto& [k, v] : t.items()) {
      if (!tolerance_defaults().count(k)) throw ConfigError("unknown tolerance '" + k + "'");
      if (!v.is_number()) throw ConfigError("tolerance '" + k + "' must be a number");
      c.tolerances[k] = v.get<double>();
    }
  }
  if (j.contains("out")) c.out = require<std::string>(j, "out", &json::is_string);
  if (j.contains("dump")) c.dump = require<bool>(j, "dump", &json::is_boolean);
  if (j.contains("manifest")) c.manifest = require<std::string>(j, "manifest", &json::is_string);
  return c;
}

json config_to_json(const SuiteConfig& c) {
  json j;
  j["suite"] = c.suite;
  j["seed"] = c.seed;
  if (c.n) j["n"] = c.n;
  if (c.corpus) j["corpus"] = c.corpus;
  if (c.grid) j["grid"] = {{"origin", c.grid->origin}, {"cell_width", c.grid->cell_width}, {"num_cells", c.grid->num_cells}};
  if (!c.tolerances.empty()) j["tolerances"] = c.tolerances;
  return j;
}

SuiteConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  SuiteConfig c = config_from_json(j);
  // A relative manifest path is taken relative to the config file.
  if (c.manifest && c.manifest->is_relative()) c.manifest = path.parent_path() / *c.manifest;
  return c;
}

// ---- Rows ---------------------------------------------------------------------------

namespace {

const char* relation_text(Relation r) { return r == Relation::le ? "<=" : r == Relation::ge ? ">=" : "=="; }

Relation relation_from(const std::string& s) {
  if (s == "<=") return Relation::le;
  if (s == ">=") return Relation::ge;
  return Relation::eq;
}

std::string fmt(double v) { return format_double(v); }

CheckRow make_row(const std::string& check, std::size_t item, double value, Relation rel, double bound,
                  std::string detail = {}) {
  CheckRow r;
  r.check = check;
  r.item = item;
  r.value = value;
  r.relation = rel;
  r.bound = bound;
  // NaN compares false in every branch, so it never passes.
  r.pass = rel == Relation::le ? value <= bound : rel == Relation::ge ? value >= bound : value == bound;
  r.detail = std::move(detail);
  return r;
}

// Deterministic per-check stream derived from the run seed and the check's name.
std::uint64_t stream_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return seed ^ h;
}

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

double sup_norm(const Mat& m) { return std::sqrt(psd_top_eigenvalue(m.adjoint() * m)); }

struct ItemOut {
  std::vector<CheckRow> rows;
  std::vector<CzRow> cz;
  json data = json::object();
};

// Shared per-suite quantities that several checks need (computed once, deterministically).
struct Shared {
  double c_hilbert = 0.0, c_rotated = 0.0;
  double t_hilbert = 0.0, t_rotated = 0.0;
  bool t_hilbert_converged = false, t_rotated_converged = false;
  HormanderEstimate h_hilbert, h_rotated;
};

struct Env {
  const SuiteConfig& cfg;
  std::string suite;
  std::string def;
  const Shared* shared = nullptr;

  Rng rng(std::size_t item) const { return item_rng(stream_seed(cfg.seed, suite + "/" + def), item); }
  Eigen::Index dim(Eigen::Index fallback) const { return cfg.n ? cfg.n : fallback; }
  Grid grid_or(const Grid& fallback) const { return cfg.grid ? *cfg.grid : fallback; }
};

using ItemFn = std::function<ItemOut(const Env&, std::size_t, bool)>;

struct CheckDef {
  std::string name;
  std::size_t items = 1;
  bool scalable = false;  // SuiteConfig::corpus replaces `items`
  bool needs_shared = false;
  ItemFn fn;
};

// ---- bmo ----------------------------------------------------------------------------

// Direct O(N^3) recomputation over all aligned intervals, with an independent eigen solver.
double naive_bmo(const GridFn& f0, Side side) {
  const GridFn f = side == Side::column ? f0 : f0.adjoint();
  const std::size_t n = f.size();
  const double h = f.grid().cell_width;
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j) {
      Mat mean = Mat::Zero(f.rows(), f.cols());
      for (std::size_t k = i; k < j; ++k) mean += f[k];
      mean /= static_cast<double>(j - i);
      Mat q = Mat::Zero(f.cols(), f.cols());
      for (std::size_t k = i; k < j; ++k) q += (f[k] - mean).adjoint() * (f[k] - mean);
      q *= h / (static_cast<double>(j - i) * h);
      Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (q + q.adjoint()), Eigen::EigenvaluesOnly);
      best = std::max(best, es.eigenvalues().maxCoeff());
    }
  return std::sqrt(std::max(best, 0.0));
}

// Scalar BMO with plain complex arithmetic.
double scalar_bmo(const GridFn& f) {
  std::vector<cplx> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = f[i](0, 0);
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j <= v.size(); ++j) {
      cplx mean = 0.0;
      for (std::size_t k = i; k < j; ++k) mean += v[k];
      mean /= static_cast<double>(j - i);
      double acc = 0.0;
      for (std::size_t k = i; k < j; ++k) acc += std::norm(v[k] - mean);
      best = std::max(best, acc / static_cast<double>(j - i));
    }
  return std::sqrt(best);
}

GridFn bmo_corpus_item(const Env& env, Rng& rng, std::size_t item, Eigen::Index& n) {
  static const Eigen::Index dims[] = {1, 2, 4};
  n = env.dim(dims[item % 3]);
  const Grid g = env.grid_or(Grid(0.0, 1.0 / 128, 128));
  return item % 2 ? random_steps(rng, g, n, 12) : random_gridfn(rng, g, n, n);
}

std::vector<CheckDef> bmo_checks() {
  std::vector<CheckDef> v;
  v.push_back({"naive_equivalence", 100, true, false, [](const Env& env, std::size_t item, bool want) {
                 Rng rng = env.rng(item);
                 Eigen::Index n = 0;
                 const GridFn f = bmo_corpus_item(env, rng, item, n);
                 ItemOut out;
                 double worst = 0.0;
                 std::ostringstream d;
                 d << "n=" << n;
                 for (Side s : {Side::column, Side::row}) {
                   const double scan = bmo_norm(f, s).norm;
                   const double naive = naive_bmo(f, s);
                   worst = std::max(worst, rel_diff(scan, naive));
                   d << ";" << to_string(s) << "=" << fmt(scan) << ";naive_" << to_string(s) << "=" << fmt(naive);
                 }
                 out.rows.push_back(make_row("naive_equivalence", item, worst, Relation::le, env.cfg.tol("bmo_rel"), d.str()));
                 if (n == 1) {
                   const double sc = scalar_bmo(f);
                   const double col = bmo_norm(f, Side::column).norm, row = bmo_norm(f, Side::row).norm;
                   const double diff = std::max(rel_diff(col, sc), rel_diff(row, sc));
                   out.rows.push_back(make_row("scalar_reduction", item, diff, Relation::le, env.cfg.tol("bmo_rel"),
                                               "scalar=" + fmt(sc)));
                 }
                 if (want) out.data["f"] = to_json(f);
                 return out;
               }});
  v.push_back({"invariances", 20, true, false, [](const Env& env, std::size_t item, bool want) {
                 Rng rng = env.rng(item);
                 Eigen::Index n = 0;
                 const GridFn f = bmo_corpus_item(env, rng, item, n);
                 const Mat c = random_mat(rng, n, n);
                 const double base = bmo_norm(f, Side::column).norm;
                 const double shifted = bmo_norm(f + constant_fn(f.grid(), c), Side::column).norm;
                 const double scaled = bmo_norm(cplx(-1.5, 2.0) * f, Side::column).norm;
                 const GridFn moved(Grid(f.grid().origin + 3.25, f.grid().cell_width, f.grid().num_cells), f.values());
                 const double translated = bmo_norm(moved, Side::column).norm;
                 ItemOut out;
                 const double tol = env.cfg.tol("bmo_rel");
                 out.rows.push_back(make_row("shift_invariance", item, rel_diff(base, shifted), Relation::le, tol));
                 out.rows.push_back(make_row("homogeneity", item, rel_diff(2.5 * base, scaled), Relation::le, tol));
                 out.rows.push_back(make_row("translation_invariance", item, rel_diff(base, translated), Relation::le, tol));
                 if (want) {
                   out.data["f"] = to_json(f);
                   out.data["c"] = to_json(c);
                 }
                 return out;
               }});
  v.push_back({"windows_scan", 10, true, false, [](const Env& env, std::size_t item, bool want) {
                 Rng rng = env.rng(item);
                 Eigen::Index n = 0;
                 const GridFn f = bmo_corpus_item(env, rng, item, n);
                 const BmoReport w = bmo_norm(f, Side::column, Search::windows(4));
                 ItemOut out;
                 // The shifted candidates can only raise the estimate; the size of the gain is reported.
                 out.rows.push_back(make_row("windows_scan", item, w.norm, Relation::ge, w.aligned_norm,
                                             "gain=" + fmt(w.norm - w.aligned_norm) +
                                                 ";scanned=" + std::to_string(w.intervals_scanned)));
                 if (want) out.data["f"] = to_json(f);
                 return out;
               }});
  return v;
}

// ---- atoms --------------------------------------------------------------------------

std::vector<CheckDef> atoms_checks() {
  std::vector<CheckDef> v;
  v.push_back({"atom_contraction", 1000, true, false, [](const Env& env, std::size_t item, bool want) {
                 Rng rng = env.rng(item);
                 static const Eigen::Index dims[] = {1, 2, 3};
                 const Eigen::Index n = env.dim(dims[item % 3]);
                 const Grid g = env.grid_or(Grid(-1.0, 1.0 / 32, 64));
                 const CAtom a = random_atom(rng, g, n, 32);
                 const AtomReport r = validate_atom(a);
                 ItemOut out;
                 CheckRow row = make_row("atom_contraction", item, r.l1_norm, Relation::le, 1.0 + env.cfg.tol("contraction"),
                                         "valid=" + std::to_string(r.valid) + ";slack=" + fmt(r.norm_slack));
                 row.pass = row.pass && r.valid;
                 out.rows.push_back(row);
                 if (want) out.data["atom"] = to_json(a);
                 return out;
               }});
  v.push_back({"meyer", 100, true, false, [](const Env& env, std::size_t item, bool want) {
                 Rng rng = env.rng(item);
                 const Eigen::Index n = env.dim(2);
                 const GridFn f = random_mean_zero(rng, Grid(-4.0, 1.0 / 16, 128), n);
                 const MeyerResult m = meyer_decompose(f);
                 GridFn sum(f.grid(), n);
                 double lambda_sum = 0.0;
                 bool all_valid = true;
                 double worst_slack = 0.0;
                 for (const auto& t : m.terms) {
                   sum = add_on_hull(sum, t.lambda * t.b);
                   lambda_sum += std::abs(t.lambda);
                   const AtomReport r = validate_atom({t.b, identity(n) / std::sqrt(double(n)), t.support});
                   all_valid = all_valid && r.support_ok && r.mean_zero_ok;
                   worst_slack = std::max(worst_slack, r.norm_slack);
                 }
                 const double weighted = weighted_l2_norm(f, Weight::poisson_up);
                 const double ratio = lambda_sum / weighted;
                 ItemOut out;
                 out.rows.push_back(make_row("meyer_reconstruction", item, max_cell_diff(sum, f), Relation::le,
                                             env.cfg.tol("meyer_recon"), "terms=" + std::to_string(m.terms.size())));
                 out.rows.push_back(make_row("meyer_atoms", item, worst_slack, Relation::le, 1.0 + 1e-12,
                                             "all_valid=" + std::to_string(all_valid)));
                 out.rows.back().pass = out.rows.back().pass && all_valid;
                 out.rows.push_back(make_row("meyer_constant", item, ratio, Relation::le,
                                             fixtures::kMeyerConstant * (1.0 + env.cfg.tol("meyer_slack")),
                                             "lambda_sum=" + fmt(lambda_sum) + ";weighted_l2=" + fmt(weighted)));
                 if (want) out.data["f"] = to_json(f);
                 return out;
               }});
  v.push_back({"c_decompose", 20, true, false, [](const Env& env, std::size_t item, bool want) {
                 Rng rng = env.rng(item);
                 const Eigen::Index n = env.dim(2);
                 const GridFn f = random_mean_zero(rng, Grid(-2.0, 1.0 / 16, 64), n);
                 const CDecomposition d = c_decompose(f);
                 bool valid = true;
                 for (const auto& t : d.terms) valid = valid && validate_atom(t.atom).valid;
                 const double err = max_cell_diff(d.reconstruct(), f);
                 ItemOut out;
                 CheckRow row = make_row("c_decompose", item, err, Relation::le,
                                         env.cfg.tol("decompose_recon") * d.abs_lambda_sum(),
                                         "terms=" + std::to_string(d.terms.size()) + ";atoms_valid=" + std::to_string(valid));
                 row.pass = row.pass && valid;
                 out.rows.push_back(row);
                 if (want) out.data["f"] = to_json(f);
                 return out;
               }});
  v.push_back({"molecule", 200, true, false, [](const Env& env, std::size_t item, bool want) {
                 Rng rng = env.rng(item);
                 const CAtom a = random_atom(rng, Grid(-1.0, 1.0 / 32, 64), env.dim(2), 32, 1.0);
                 const MoleculeReport m = molecule_check(a.b, a.I.center(), a.I.length());
                 ItemOut out;
                 CheckRow row = make_row("molecule", item, m.ratio, Relation::le, env.cfg.tol("molecule_constant") * (1.0 + 1e-12),
                                         "mean_norm=" + fmt(m.mean_norm));
                 row.pass = row.pass && m.mean_zero;
                 out.rows.push_back(row);
                 if (want) out.data["atom"] = to_json(a);
                 return out;
               }});
  v.push_back({"mollify_atom", 20, true, false, [](const Env& env, std::size_t item, bool want) {
                 Rng rng = env.rng(item);
                 const CAtom a = random_atom(rng, Grid(0.0, 1.0 / 32, 64), env.dim(2), 16);
                 static const int scales[] = {1, 3, 8, 40};
                 const int nm = scales[item % 4];
                 const MollifiedAtom m = mollify_atom(a, nm);
                 const GridFn direct = convolve(a.b, Mollifier(nm));
                 double wsum = 0.0;
                 bool valid = true;
                 GridFn sum(a.b.grid(), a.b.rows(), a.b.cols());
                 for (const auto& [w, at] : m.combination) {
                   wsum += w;
                   valid = valid && validate_atom(at).valid;
                   sum = add_on_hull(sum, w * at.b);
                 }
                 double err = max_cell_diff(sum, direct);
                 if (m.residual) {
                   valid = valid && validate_atom(*m.residual).valid;
                   err = std::max(err, max_cell_diff(add_on_hull(*m.residual_coeff * m.residual->b, a.b), direct));
                 }
                 err = std::max(err, std::abs(wsum - 2.0));
                 ItemOut out;
                 CheckRow row = make_row("mollify_atom", item, err, Relation::le, env.cfg.tol("mollify_recon"),
                                         "n=" + std::to_string(nm) + ";pieces=" + std::to_string(m.combination.size()) +
                                             ";residual=" + (m.residual_coeff ? fmt(*m.residual_coeff) : std::string("none")));
                 row.pass = row.pass && valid;
                 out.rows.push_back(row);
                 if (want) out.data["atom"] = to_json(a);
                 return out;
               }});
  return v;
}

// ---- garnett ------------------------------------------------------------------------

std::vector<CheckDef> garnett_checks() {
  std::vector<CheckDef> v;
  v.push_back({"garnett", 100, true, false, [](const Env& env, std::size_t item, bool want) {
                 Rng rng = env.rng(item);
                 const Eigen::Index n = env.dim(2);
                 const Grid g = env.grid_or(Grid(0.0, 1.0 / 16, 128));
                 const GridFn phi = item % 2 ? random_steps(rng, g, n, 8) : random_gridfn(rng, g, n, n);
                 std::size_t top = 1;
                 while (3u << (top + 1) <= g.num_cells && top < 4) ++top;
                 std::uniform_int_distribution<std::size_t> kd(1, top);
                 const std::size_t cells = 3u << kd(rng);
                 std::uniform_int_distribution<std::size_t> sd(0, g.num_cells - cells);
                 const std::size_t s0 = sd(rng);
                 const Interval J{g.left(s0), g.left(s0 + cells)};
                 const GridFn psi = garnett_truncate(phi, J);
                 const Interval three = J.dilate(3.0);
                 const Mat mj = interval_mean(phi, J);
                 double outside = 0.0, on_j = 0.0;
                 for (std::size_t i = 0; i < psi.size(); ++i) {
                   const double x = psi.grid().mid(i);
                   if (x < three.a || x > three.b) outside = std::max(outside, psi[i].cwiseAbs().maxCoeff());
                   if (x > J.a && x < J.b) on_j = std::max(on_j, (psi[i] - (phi.at(x) - mj)).cwiseAbs().maxCoeff());
                 }
                 const double bp = bmo_norm(phi, Side::column).norm;
                 const double bq = bmo_norm(psi, Side::column).norm;
                 const double ratio = bp > 0.0 ? bq / bp : 0.0;
                 const std::string where = "J_left=" + fmt(J.a) + ";J_right=" + fmt(J.b);
                 ItemOut out;
                 out.rows.push_back(make_row("support_3j", item, outside, Relation::eq, 0.0, where));
                 out.rows.push_back(make_row("equal_on_j", item, on_j, Relation::eq, 0.0, where));
                 out.rows.push_back(make_row("garnett_bound", item, ratio, Relation::le,
                                             env.cfg.tol("garnett_constant") * (1.0 + env.cfg.tol("garnett_slack")),
                                             where + ";bmo_phi=" + fmt(bp) + ";bmo_psi=" + fmt(bq)));
                 if (want) {
                   out.data["phi"] = to_json(phi);
                   out.data["J"] = {J.a, J.b};
                 }
                 return out;
               }});
  return v;
}

// ---- duality ------------------------------------------------------------------------

std::vector<CheckDef> duality_checks() {
  std::vector<CheckDef> v;
  v.push_back({"pairing_bound", 1000, true, false, [](const Env& env, std::size_t item, bool want) {
                 Rng rng = env.rng(item);
                 const Eigen::Index n = env.dim(2);
                 const Grid g = env.grid_or(Grid(0.0, 1.0 / 16, 48));
                 const GridFn phi = item % 2 ? random_steps(rng, g, n, 8) : random_gridfn(rng, g, n, n);
                 const CAtom a = random_atom(rng, g, n, g.num_cells);
                 const double bmo = bmo_norm(phi, Side::row).norm;
                 const cplx p = duality_pair(phi, a);
                 const Mat c = random_mat(rng, n, n);
                 const cplx ps = duality_pair(phi + constant_fn(g, c), a);
                 ItemOut out;
                 out.rows.push_back(make_row("pairing_bound", item, std::abs(p), Relation::le,
                                             bmo * (1.0 + env.cfg.tol("duality")), "bmo_row=" + fmt(bmo)));
                 out.rows.push_back(make_row("pairing_mod_constants", item, std::abs(ps - p), Relation::le,
                                             env.cfg.tol("pairing_constant") * (1.0 + std::abs(p) + c.norm() * weighted_l2_norm(a.b))));
                 if (want) {
                   out.data["phi"] = to_json(phi);
                   out.data["atom"] = to_json(a);
                 }
                 return out;
               }});
  v.push_back({"extremal_sup", 50, true, false, [](const Env& env, std::size_t item, bool want) {
                 Rng rng = env.rng(item);
                 const Eigen::Index n = env.dim(2);
                 const Grid g(0.0, 1.0 / 16, 32);
                 const GridFn phi = item % 2 ? random_steps(rng, g, n, 8) : random_gridfn(rng, g, n, n);
                 double best = 0.0;
                 Interval arg{g.left(0), g.left(2)};
                 for (std::size_t i = 0; i < g.num_cells; ++i)
                   for (std::size_t j = i + 2; j <= g.num_cells; ++j) {
                     const Interval I{g.left(i), g.left(j)};
                     try {
                       const double p = duality_pair(phi, extremal_atom(phi, I)).real();
                       if (p > best) {
                         best = p;
                         arg = I;
                       }
                     } catch (const Error&) {
                       // Flat on I: the oscillation vanishes and pairs to zero.
                     }
                   }
                 const double bmo = bmo_norm(phi, Side::row).norm;
                 ItemOut out;
                 out.rows.push_back(make_row("extremal_sup", item, rel_diff(best, bmo), Relation::le, env.cfg.tol("extremal"),
                                             "sup=" + fmt(best) + ";bmo_row=" + fmt(bmo) + ";argmax_left=" + fmt(arg.a) + ";argmax_right=" + fmt(arg.b)));
                 if (want) out.data["phi"] = to_json(phi);
                 return out;
               }});
  return v;
}

// ---- cz -----------------------------------------------------------------------------

Grid cz_atom_grid() { return Grid(-2.0, 1.0 / 16, 64); }
Grid cz_probe() { return Grid(0.0, 1.0 / 16, 256); }
constexpr double kCzLambda = 2.0;
const int kLadder[] = {4, 8, 16, 32};

KernelPtr cz_kernel(const Env& env, bool rotated) { return rotated ? rotated_kernel() : hilbert_kernel(env.dim(2)); }

Shared prepare_cz(const SuiteConfig& cfg) {
  Shared s;
  const Env env{cfg, "cz", "shared", nullptr};
  s.h_hilbert = hormander_constant(*cz_kernel(env, false), kCzLambda);
  s.h_rotated = hormander_constant(*cz_kernel(env, true), kCzLambda);
  s.c_hilbert = s.h_hilbert.upper();
  s.c_rotated = s.h_rotated.upper();
  const NormEstimate th = l2_operator_norm(*cz_kernel(env, false), 0.0, cz_probe(), 2000);
  const NormEstimate tr = l2_operator_norm(*cz_kernel(env, true), 0.0, cz_probe(), 2000);
  s.t_hilbert = th.value;
  s.t_rotated = tr.value;
  s.t_hilbert_converged = th.converged;
  s.t_rotated_converged = tr.converged;
  return s;
}

ItemFn cz_atom_item(bool rotated) {
  return [rotated](const Env& env, std::size_t item, bool want) {
    Rng rng = env.rng(item);
    const KernelPtr k = cz_kernel(env, rotated);
    const CAtom a = random_atom(rng, cz_atom_grid(), k->in_dim(), 16);
    CzBounds b;
    b.lambda = kCzLambda;
    b.c_lambda = rotated ? env.shared->c_rotated : env.shared->c_hilbert;
    b.t_norm = rotated ? env.shared->t_rotated : env.shared->t_hilbert;
    b.eps = env.cfg.tol("cz_eps");
    const CzAtomReport r = cz_atom_check(*k, 0.0, a, b);
    ItemOut out;
    const std::string name = rotated ? "cz_atom_rotated" : "cz_atom_hilbert";
    CheckRow row = make_row(name, item, r.total, Relation::le, r.bound,
                            "near=" + fmt(r.near) + ";near_bound=" + fmt(r.near_bound * (1.0 + b.eps)) + ";far=" +
                                fmt(r.far) + ";far_bound=" + fmt(r.far_bound * (1.0 + b.eps)));
    row.pass = r.pass();
    out.rows.push_back(row);
    out.cz.push_back({k->tag(), b.lambda, b.c_lambda, b.t_norm, item, r.near, r.far, r.total, r.bound, r.pass()});
    if (want) {
      out.data["kernel"] = k->tag();
      out.data["atom"] = to_json(a);
      out.data["c_lambda"] = b.c_lambda;
      out.data["t_norm"] = b.t_norm;
    }
    return out;
  };
}

std::vector<CheckDef> cz_checks() {
  std::vector<CheckDef> v;
  v.push_back({"hormander", 1, false, true, [](const Env& env, std::size_t item, bool) {
                 const Shared& s = *env.shared;
                 const double ln3 = std::log(3.0);
                 const double tol = env.cfg.tol("hormander_anchor");
                 ItemOut out;
                 auto pair = [](const HormanderEstimate& h) {
                   return "tail=" + fmt(h.tail_bound) + ";pairs=" + std::to_string(h.pairs_sampled) + ";y=" + fmt(h.y) +
                          ";y_prime=" + fmt(h.y_prime) + ";converged=" + std::to_string(h.converged);
                 };
                 out.rows.push_back(make_row("hormander_hilbert", item, std::abs(s.h_hilbert.c_lambda - ln3), Relation::le, tol,
                                             "c_lambda=" + fmt(s.h_hilbert.c_lambda) + ";" + pair(s.h_hilbert)));
                 out.rows.push_back(make_row("hormander_rotated", item, s.h_rotated.c_lambda, Relation::le, ln3 + tol,
                                             pair(s.h_rotated)));
                 const HormanderEstimate hc =
                     hormander_constant(*constant_kernel(Mat::Constant(2, 2, cplx(0.5, -0.25))), kCzLambda);
                 out.rows.push_back(make_row("hormander_constant_kernel", item, hc.c_lambda, Relation::eq, 0.0));
                 return out;
               }});
  v.push_back({"operator_norm", 1, false, true, [](const Env& env, std::size_t item, bool) {
                 const Shared& s = *env.shared;
                 ItemOut out;
                 const double pi = std::numbers::pi;
                 CheckRow h = make_row("norm_hilbert", item, s.t_hilbert, Relation::le, pi * (1.0 + 1e-9),
                                       "reference=" + fmt(fixtures::kHilbertProbeNorm) +
                                           ";converged=" + std::to_string(s.t_hilbert_converged));
                 h.pass = h.pass && s.t_hilbert_converged;
                 out.rows.push_back(h);
                 // Regression against the frozen probe value.
                 out.rows.push_back(make_row("norm_hilbert_regression", item, rel_diff(s.t_hilbert, fixtures::kHilbertProbeNorm),
                                             Relation::le, env.cfg.tol("norm_regression")));
                 CheckRow r = make_row("norm_rotated", item, s.t_rotated, Relation::le, pi * (1.0 + 1e-9),
                                       "converged=" + std::to_string(s.t_rotated_converged));
                 r.pass = r.pass && s.t_rotated_converged;
                 out.rows.push_back(r);
                 out.rows.push_back(make_row("commutator_witness", item, commutator_witness(*rotated_kernel()), Relation::ge,
                                             1e-3, "kernel=rotated"));
                 return out;
               }});
  v.push_back({"cz_atom_hilbert", 500, true, true, cz_atom_item(false)});
  v.push_back({"cz_atom_rotated", 500, true, true, cz_atom_item(true)});
  v.push_back({"decomposition_independence", 10, true, true, [](const Env& env, std::size_t item, bool want) {
                 Rng rng = env.rng(item);
                 const KernelPtr k = cz_kernel(env, false);
                 const Grid g = cz_atom_grid();
                 const CAtom a1 = random_atom(rng, g, k->in_dim(), 16), a2 = random_atom(rng, g, k->in_dim(), 16);
                 std::normal_distribution<double> nd;
                 CDecomposition hand;
                 hand.terms = {{cplx(nd(rng), nd(rng)), a1}, {cplx(nd(rng), nd(rng)), a2}};
                 hand.target_grid = g;
                 const CDecomposition meyer = c_decompose(hand.reconstruct());
                 CzBounds b;
                 b.lambda = kCzLambda;
                 b.c_lambda = env.shared->c_hilbert;
                 b.t_norm = env.shared->t_hilbert;
                 b.eps = env.cfg.tol("cz_eps");
                 const Grid w = g.cover({-48.0, 48.0});
                 const DecompositionApply p = apply_to_decomposition(*k, 0.0, hand, b, w);
                 const DecompositionApply q = apply_to_decomposition(*k, 0.0, meyer, b, w);
                 const double scale = std::max(hand.abs_lambda_sum(), meyer.abs_lambda_sum());
                 ItemOut out;
                 CheckRow row = make_row("decomposition_independence", item, l1_norm(p.result - q.result) / scale, Relation::le,
                                         env.cfg.tol("independence"),
                                         "hand_pass=" + std::to_string(p.pass) + ";meyer_pass=" + std::to_string(q.pass) +
                                             ";hand_l1=" + fmt(p.l1) + ";hand_bound=" + fmt(p.bound));
                 row.pass = row.pass && p.pass && q.pass;
                 out.rows.push_back(row);
                 if (want) out.data["decomposition"] = to_json(hand);
                 return out;
               }});
  v.push_back({"mollified_convergence", 4, false, false, [](const Env& env, std::size_t item, bool want) {
                 Rng rng = env.rng(item);
                 const bool rotated = item % 2 == 1;
                 const KernelPtr k = cz_kernel(env, rotated);
                 const Grid g(-2.0, 1.0 / 64, 256);
                 const GridFn f = random_smooth(rng, g, {-1.0, 1.0}, k->in_dim());
                 const GridFn tf = apply_kernel(*k, f, 0.0);
                 const double base = weighted_l2_norm(tf);
                 double prev = kInf, last = 0.0;
                 bool decreasing = true;
                 std::ostringstream d;
                 d << "kernel=" << k->tag();
                 for (int m : kLadder) {
                   const double err = weighted_l2_norm(mollified_apply(*k, f, m, 0.0, g) - tf);
                   decreasing = decreasing && err < prev;
                   prev = err;
                   last = err;
                   d << ";m" << m << "=" << fmt(err / base);
                 }
                 d << ";decreasing=" << decreasing;
                 ItemOut out;
                 CheckRow row = make_row("mollified_convergence", item, last / base, Relation::le, env.cfg.tol("ladder_ratio"), d.str());
                 row.pass = row.pass && decreasing;
                 out.rows.push_back(row);
                 if (want) out.data["f"] = to_json(f);
                 return out;
               }});
  v.push_back({"lipschitz", 8, false, false, [](const Env& env, std::size_t item, bool) {
                 // item = 4 * kernel + ladder index; 1250 triples each, 10^4 in total.
                 Rng rng = env.rng(item);
                 const bool rotated = item >= 4;
                 const int m = kLadder[item % 4];
                 const double t_norm = std::numbers::pi;
                 const KernelPtr km = mollified_kernel(cz_kernel(env, rotated), m, t_norm);
                 const double c = double(m) * m * t_norm * std::sqrt(bump::kL2NormSq) * bump::derivative_sup();
                 std::uniform_real_distribution<double> ux(-3.0 / m, 3.0 / m);
                 std::uniform_real_distribution<double> ul(std::log(1e-3 / m), std::log(1.0 / m));
                 double worst = 0.0;
                 double wx = 0.0, wy = 0.0, wyp = 0.0;
                 for (int t = 0; t < 1250; ++t) {
                   const double x = ux(rng), y = x + ux(rng);
                   const double yp = y + std::exp(ul(rng)) * (t % 2 ? 1.0 : -1.0);
                   const double lhs = sup_norm(km->eval(x, y) - km->eval(x, yp));
                   const double ratio = lhs / (c * std::abs(y - yp));
                   if (ratio > worst) {
                     worst = ratio;
                     wx = x;
                     wy = y;
                     wyp = yp;
                   }
                 }
                 ItemOut out;
                 out.rows.push_back(make_row("lipschitz", item, worst, Relation::le, 1.0 + env.cfg.tol("lipschitz_slack"),
                                             std::string("kernel=") + (rotated ? "rotated" : "hilbert") + ";m=" + std::to_string(m) +
                                                 ";x=" + fmt(wx) + ";y=" + fmt(wy) + ";y_prime=" + fmt(wyp)));
                 return out;
               }});
  v.push_back({"mollified_hormander", 4, false, false, [](const Env& env, std::size_t item, bool) {
                 const int m = kLadder[item];
                 HormanderOptions o;
                 o.x_extent = 1e4;
                 const HormanderEstimate h = hormander_constant(*mollified_kernel(hilbert_kernel(), m), 4.0, o);
                 ItemOut out;
                 CheckRow row = make_row("mollified_hormander", item, h.c_lambda, Relation::le, env.cfg.tol("mollified_hormander"),
                                         "m=" + std::to_string(m) + ";tail=" + fmt(h.tail_bound) + ";y=" + fmt(h.y) +
                                             ";y_prime=" + fmt(h.y_prime) + ";converged=" + std::to_string(h.converged));
                 row.pass = row.pass && h.converged;
                 out.rows.push_back(row);
                 return out;
               }});
  return v;
}

// ---- lp -----------------------------------------------------------------------------

constexpr std::size_t kPoissonNodes = 48;

PoissonGrid lp_grid(const Grid& g) { return PoissonGrid::for_window(g.cell_width, g.window().length(), kPoissonNodes); }

GridFn step_pair() {
  GridFn f(Grid(0.0, 1.0 / 16, 32), 1);
  for (std::size_t i = 0; i < 32; ++i) f[i](0, 0) = i < 16 ? 1.0 : -1.0;
  return f;
}

std::vector<CheckDef> lp_checks() {
  std::vector<CheckDef> v;
  v.push_back({"fixed", 1, false, false, [](const Env& env, std::size_t item, bool) {
                 ItemOut out;
                 const Grid g(0.0, 1.0 / 16, 32);
                 const LittlewoodPaleyResult z = littlewood_paley_g(GridFn(g, 2), lp_grid(g));
                 out.rows.push_back(make_row("g_zero", item, z.field.is_zero() ? 0.0 : 1.0, Relation::eq, 0.0,
                                             "l1=" + fmt(z.l1)));
                 const GridFn f = step_pair();
                 const LittlewoodPaleyResult r = littlewood_paley_g(f, lp_grid(f.grid()));
                 out.rows.push_back(make_row("step_pair_refinement", item, r.refinement_change, Relation::le, env.cfg.tol("lp_refine"),
                                             "l1=" + fmt(r.l1) + ";refined_l1=" + fmt(r.refined_l1)));
                 out.rows.push_back(make_row("step_pair_regression", item, rel_diff(r.l1, fixtures::kStepPairGL1), Relation::le,
                                             env.cfg.tol("lp_regression"), "l1=" + fmt(r.l1)));
                 return out;
               }});
  v.push_back({"poisson_mass", kPoissonNodes, false, false, [](const Env& env, std::size_t item, bool) {
                 const Grid g = cz_atom_grid();
                 const double y = lp_grid(g).y_nodes[item];
                 // Geometric panels out to 1e12 y; the neglected tail is (2/pi) atan(1e-12).
                 double acc = 0.0;
                 for (double t = 0.0, step = y / 8; t < 1e12 * y; step *= 2.0) {
                   acc += 2.0 * gauss_integrate([&](double x) { return poisson::kernel(x, y); }, t, t + step, 16);
                   t += step;
                 }
                 ItemOut out;
                 out.rows.push_back(make_row("poisson_mass", item, std::abs(acc - 1.0), Relation::le, env.cfg.tol("poisson_mass"),
                                             "y=" + fmt(y)));
                 return out;
               }});
  v.push_back({"g_ratio", 200, true, false, [](const Env& env, std::size_t item, bool want) {
                 Rng rng = env.rng(item);
                 const Grid g = cz_atom_grid();
                 const CAtom a = random_atom(rng, g, env.dim(2), 16);
                 CDecomposition dec;
                 dec.terms.push_back({cplx(1.0), a});
                 dec.target_grid = g;
                 const PoissonGrid pg = lp_grid(g);
                 LittlewoodPaleyOptions o;
                 const LittlewoodPaleyResult lp = littlewood_paley_g(dec.reconstruct(), pg, o);
                 const double ratio = lp.l1 / dec.abs_lambda_sum();
                 ItemOut out;
                 out.rows.push_back(make_row("g_ratio", item, ratio, Relation::le, env.cfg.tol("lp_constant"),
                                             "g_l1=" + fmt(lp.l1)));
                 out.rows.push_back(make_row("g_refinement", item, lp.refinement_change, Relation::le, env.cfg.tol("lp_refine")));
                 if (want) out.data["atom"] = to_json(a);
                 return out;
               }});
  v.push_back({"kernel_path", 5, true, false, [](const Env& env, std::size_t item, bool want) {
                 Rng rng = env.rng(item);
                 const Grid g(0.0, 1.0 / 8, 16);
                 const PoissonGrid pg = PoissonGrid::for_window(g.cell_width, g.window().length(), 24);
                 const Eigen::Index n = env.dim(1 + static_cast<Eigen::Index>(item % 2));
                 const GridFn f = random_mean_zero(rng, g, n);
                 LittlewoodPaleyOptions lo;
                 lo.out_grid = g.widen(16, 16);
                 lo.check_refinement = false;
                 const LittlewoodPaleyResult direct = littlewood_paley_g(f, pg, lo);
                 ApplyOptions ao;
                 ao.out_grid = lo.out_grid;
                 ao.x_rule = XRule::midpoint;
                 const GridFn tf = apply_kernel(*poisson_gradient_kernel(pg, n), f, 0.0, ao);
                 double worst = 0.0, top = 0.0;
                 for (std::size_t i = 0; i < tf.size(); ++i) {
                   worst = std::max(worst, (sqrt_psd(tf[i].adjoint() * tf[i]) - direct.field[i]).norm());
                   top = std::max(top, direct.field[i].norm());
                 }
                 ItemOut out;
                 out.rows.push_back(make_row("kernel_path", item, top > 0.0 ? worst / top : worst, Relation::le,
                                             env.cfg.tol("lp_kernel_path")));
                 if (want) out.data["f"] = to_json(f);
                 return out;
               }});
  v.push_back({"g_scaling", 10, true, false, [](const Env& env, std::size_t item, bool want) {
                 Rng rng = env.rng(item);
                 const Grid g = cz_atom_grid();
                 const CAtom a = random_atom(rng, g, env.dim(2), 16);
                 CDecomposition one;
                 one.terms.push_back({cplx(1.0), a});
                 one.target_grid = g;
                 CDecomposition two = one;
                 two.terms[0].lambda = 2.0;
                 LittlewoodPaleyOptions lo;
                 lo.check_refinement = false;
                 const PoissonGrid pg = lp_grid(g);
                 const double r1 = g_h1_check(one, pg, lo).ratio, r2 = g_h1_check(two, pg, lo).ratio;
                 ItemOut out;
                 out.rows.push_back(make_row("g_scaling", item, rel_diff(r1, r2), Relation::le, env.cfg.tol("lp_scaling")));
                 if (want) out.data["atom"] = to_json(a);
                 return out;
               }});
  return v;
}

std::vector<CheckDef> checks_for(const std::string& suite) {
  if (suite == "bmo") return bmo_checks();
  if (suite == "atoms") return atoms_checks();
  if (suite == "garnett") return garnett_checks();
  if (suite == "duality") return duality_checks();
  if (suite == "cz") return cz_checks();
  if (suite == "lp") return lp_checks();
  throw UnknownSuite("unknown suite '" + suite + "'");
}

std::string witness_name(const std::string& suite, const CheckRow& r) {
  return "witnesses/" + suite + "-" + r.check + "-" + std::to_string(r.item) + ".json";
}

}  // namespace

std::vector<std::string> check_names(const std::string& suite) {
  std::vector<std::string> out;
  for (const auto& c : checks_for(suite)) out.push_back(c.name);
  return out;
}

json row_to_json(const CheckRow& r) {
  return {{"suite", r.suite},         {"check", r.check}, {"item", r.item},     {"value", r.value},
          {"relation", relation_text(r.relation)}, {"bound", r.bound}, {"pass", r.pass}, {"detail", r.detail}};
}

namespace {

CheckRow row_from_json(const json& j) {
  CheckRow r;
  r.suite = j.at("suite").get<std::string>();
  r.check = j.at("check").get<std::string>();
  r.item = j.at("item").get<std::size_t>();
  r.value = j.at("value").get<double>();
  r.relation = relation_from(j.at("relation").get<std::string>());
  r.bound = j.at("bound").get<double>();
  r.pass = j.at("pass").get<bool>();
  r.detail = j.at("detail").get<std::string>();
  return r;
}

json witness_doc(const SuiteConfig& cfg, const std::string& def, const CheckRow& r, const json& data) {
  return {{"suite", r.suite}, {"def", def},          {"check", r.check}, {"item", r.item},
          {"config", config_to_json(cfg)}, {"row", row_to_json(r)}, {"data", data}};
}

}  // namespace

SuiteResult run_checks(const SuiteConfig& cfg, const std::string& suite, const std::vector<std::string>& only) {
  const std::vector<CheckDef> defs = checks_for(suite);
  for (const auto& name : only)
    if (std::none_of(defs.begin(), defs.end(), [&](const CheckDef& d) { return d.name == name; }))
      throw UnknownSuite("unknown check '" + name + "' in suite '" + suite + "'");
  auto selected = [&](const CheckDef& d) {
    return only.empty() || std::find(only.begin(), only.end(), d.name) != only.end();
  };
  std::optional<Shared> shared;
  if (std::any_of(defs.begin(), defs.end(), [&](const CheckDef& d) { return selected(d) && d.needs_shared; }))
    shared = prepare_cz(cfg);
  SuiteResult res;
  for (const auto& d : defs) {
    if (!selected(d)) continue;
    const Env env{cfg, suite, d.name, shared ? &*shared : nullptr};
    const std::size_t items = d.scalable && cfg.corpus ? cfg.corpus : d.items;
    std::vector<ItemOut> outs(items);
    parallel_for(items, [&](std::size_t i) { outs[i] = d.fn(env, i, cfg.dump); });
    for (std::size_t i = 0; i < items; ++i) {
      ItemOut& o = outs[i];
      bool need_data = cfg.dump;
      for (const auto& r : o.rows) need_data = need_data || !r.pass;
      // Failures are rare: rerun the item to collect its inputs.
      if (need_data && !cfg.dump) o.data = d.fn(env, i, true).data;
      for (auto& r : o.rows) {
        r.suite = suite;
        if (!r.pass || cfg.dump) {
          r.witness = witness_name(suite, r);
          res.witnesses[r.witness] = witness_doc(cfg, d.name, r, o.data);
        }
        res.rows.push_back(r);
      }
      for (auto& c : o.cz) res.cz_rows.push_back(c);
    }
  }
  return res;
}

// ---- Reports ------------------------------------------------------------------------

std::string csv_header() { return "suite,check,item,value,relation,bound,pass,detail,witness"; }

std::string csv_line(const CheckRow& r) {
  std::ostringstream o;
  o << r.suite << ',' << r.check << ',' << r.item << ',' << fmt(r.value) << ',' << relation_text(r.relation) << ','
    << fmt(r.bound) << ',' << (r.pass ? 1 : 0) << ',' << r.detail << ',' << r.witness;
  return o.str();
}

std::string cz_csv_header() { return "kernel,lambda,C_lambda,T_norm,atom_seed,near,far,total,bound,pass"; }

std::string cz_csv_line(const CzRow& r) {
  std::ostringstream o;
  o << r.kernel << ',' << fmt(r.lambda) << ',' << fmt(r.c_lambda) << ',' << fmt(r.t_norm) << ',' << r.atom_seed << ','
    << fmt(r.near) << ',' << fmt(r.far) << ',' << fmt(r.total) << ',' << fmt(r.bound) << ',' << (r.pass ? 1 : 0);
  return o.str();
}

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot write " + p.string());
  out << text;
  if (!out) throw OutputError("cannot write " + p.string());
}

json constants_summary(const std::vector<CheckRow>& rows) {
  // Largest observed value of each frozen-constant row next to the frozen value.
  struct Entry {
    const char* check;
    const char* name;
    double frozen;
  };
  const Entry entries[] = {{"meyer_constant", "C_emp", fixtures::kMeyerConstant},
                           {"g_ratio", "C_LP", fixtures::kLittlewoodPaleyConstant},
                           {"mollified_hormander", "C_prime", fixtures::kMollifiedHormander},
                           {"molecule", "molecule", fixtures::kMoleculeConstant},
                           {"norm_hilbert", "hilbert_probe_norm", fixtures::kHilbertProbeNorm}};
  json j = json::object();
  for (const auto& e : entries) {
    double worst = -kInf;
    std::size_t count = 0;
    for (const auto& r : rows)
      if (r.check == e.check) {
        worst = std::max(worst, r.value);
        ++count;
      }
    if (count) j[e.name] = {{"frozen", e.frozen}, {"observed_max", worst}, {"rows", count}};
  }
  return j;
}

}  // namespace

int run_suite(const SuiteConfig& cfg) {
  std::vector<std::string> suites;
  if (cfg.suite == "all")
    suites = suite_names();
  else if (std::find(suite_names().begin(), suite_names().end(), cfg.suite) != suite_names().end())
    suites = {cfg.suite};
  else
    throw UnknownSuite("unknown suite '" + cfg.suite + "'");

  json manifest;
  if (cfg.manifest) {
    std::ifstream in(*cfg.manifest);
    if (!in) throw ConfigError("cannot read manifest " + cfg.manifest->string());
    try {
      in >> manifest;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(cfg.out / "witnesses", ec);
  if (ec) throw OutputError("cannot create output directory " + cfg.out.string());

  SuiteResult all;
  for (const auto& s : suites) {
    SuiteResult r = run_checks(cfg, s);
    all.rows.insert(all.rows.end(), r.rows.begin(), r.rows.end());
    all.cz_rows.insert(all.cz_rows.end(), r.cz_rows.begin(), r.cz_rows.end());
    all.witnesses.insert(r.witnesses.begin(), r.witnesses.end());
  }

  std::ostringstream csv;
  csv << csv_header() << '\n';
  for (const auto& r : all.rows) csv << csv_line(r) << '\n';
  write_text(cfg.out / "results.csv", csv.str());
  if (!all.cz_rows.empty()) {
    std::ostringstream cz;
    cz << cz_csv_header() << '\n';
    for (const auto& r : all.cz_rows) cz << cz_csv_line(r) << '\n';
    write_text(cfg.out / "cz.csv", cz.str());
  }
  for (const auto& [name, doc] : all.witnesses) write_text(cfg.out / name, dump_json(doc) + "\n");

  json counts = json::object();
  std::size_t pass = 0, fail = 0;
  for (const auto& r : all.rows) {
    const std::string key = r.suite + "/" + r.check;
    if (!counts.contains(key)) counts[key] = {{"pass", 0}, {"fail", 0}};
    counts[key][r.pass ? "pass" : "fail"] = counts[key][r.pass ? "pass" : "fail"].get<std::size_t>() + 1;
    (r.pass ? pass : fail) += 1;
  }
  json summary;
  summary["suite"] = cfg.suite;
  summary["seed"] = cfg.seed;
  summary["config"] = config_to_json(cfg);
  summary["fixtures_version"] = fixtures::kVersion;
  summary["rows"] = all.rows.size();
  summary["pass"] = pass;
  summary["fail"] = fail;
  summary["checks"] = counts;
  summary["constants"] = constants_summary(all.rows);
  bool manifest_ok = true;
  if (cfg.manifest) {
    manifest_ok = manifest.contains("checks") && manifest.at("checks") == counts;
    summary["manifest"] = {{"path", cfg.manifest->filename().string()}, {"match", manifest_ok}};
  }
  write_text(cfg.out / "summary.json", dump_json(summary) + "\n");
  return fail == 0 && manifest_ok ? 0 : kExitChecksFailed;
}

// ---- Replay -------------------------------------------------------------------------

ReplayResult replay_witness(const json& w) {
  ReplayResult out;
  try {
    out.stored = row_from_json(w.at("row"));
    out.stored.witness = witness_name(out.stored.suite, out.stored);
    SuiteConfig cfg = config_from_json(w.at("config"));
    const std::string suite = w.at("suite").get<std::string>();
    const std::string def = w.at("def").get<std::string>();
    const std::size_t item = w.at("item").get<std::size_t>();
    const std::vector<CheckDef> defs = checks_for(suite);
    const auto it = std::find_if(defs.begin(), defs.end(), [&](const CheckDef& d) { return d.name == def; });
    if (it == defs.end()) throw ConfigError("witness names an unknown check");
    std::optional<Shared> shared;
    if (it->needs_shared) shared = prepare_cz(cfg);
    const Env env{cfg, suite, def, shared ? &*shared : nullptr};
    const ItemOut o = it->fn(env, item, true);
    const auto row = std::find_if(o.rows.begin(), o.rows.end(), [&](const CheckRow& r) { return r.check == out.stored.check; });
    if (row == o.rows.end()) throw ConfigError("witness row is not produced by its check");
    out.replayed = *row;
    out.replayed.suite = suite;
    out.replayed.witness = witness_name(suite, out.replayed);
    out.row_match = dump_json(row_to_json(out.replayed)) == dump_json(row_to_json(out.stored));
    out.data_match = dump_json(o.data) == dump_json(w.at("data"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed witness: ") + e.what());
  }
  return out;
}

}  // namespace ncvharm
