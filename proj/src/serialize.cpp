#include "ncvharm/serialize.hpp"

#include <cstdio>

#include "ncvharm/error.hpp"

namespace ncvharm {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void dump_into(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        dump_into(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump_into(j[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const json& j) {
  std::string out;
  dump_into(j, out);
  return out;
}

json to_json(const Mat& m) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) arr.push_back({m(i, k).real(), m(i, k).imag()});
  return arr;
}

Mat mat_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols) throw Error("matrix shape mismatch");
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) {
      const json& e = j[static_cast<std::size_t>(i * cols + k)];
      if (!e.is_array() || e.size() != 2) throw Error("matrix entry must be [re, im]");
      m(i, k) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  return m;
}

json to_json(const Grid& g) {
  return {{"origin", g.origin}, {"cell_width", g.cell_width}, {"num_cells", g.num_cells}};
}

Grid grid_from_json(const json& j) {
  return Grid(j.at("origin").get<double>(), j.at("cell_width").get<double>(), j.at("num_cells").get<std::size_t>());
}

json to_json(const GridFn& f) {
  json vals = json::array();
  for (std::size_t i = 0; i < f.size(); ++i) vals.push_back(to_json(f[i]));
  json j{{"grid", to_json(f.grid())}, {"dim", f.dim()}, {"values", vals}};
  if (f.rows() != f.cols()) j["rows"] = f.rows();
  return j;
}

GridFn gridfn_from_json(const json& j) {
  const Grid g = grid_from_json(j.at("grid"));
  const Eigen::Index cols = j.at("dim").get<Eigen::Index>();
  const Eigen::Index rows = j.contains("rows") ? j.at("rows").get<Eigen::Index>() : cols;
  const json& vals = j.at("values");
  if (vals.size() != g.num_cells) throw Error("value count does not match grid");
  std::vector<Mat> v;
  for (const auto& e : vals) v.push_back(mat_from_json(e, rows, cols));
  return GridFn(g, std::move(v));
}

json to_json(const CAtom& a) {
  return {{"I", {a.I.a, a.I.b}}, {"h", to_json(a.h)}, {"b", to_json(a.b)}};
}

CAtom atom_from_json(const json& j) {
  const GridFn b = gridfn_from_json(j.at("b"));
  const json& iv = j.at("I");
  return CAtom{b, mat_from_json(j.at("h"), b.cols(), b.cols()), Interval(iv.at(0).get<double>(), iv.at(1).get<double>())};
}

json to_json(const CDecomposition& d) {
  json terms = json::array();
  for (const auto& t : d.terms)
    terms.push_back({{"lambda", {t.lambda.real(), t.lambda.imag()}}, {"atom", to_json(t.atom)}});
  return {{"target_grid", to_json(d.target_grid)}, {"terms", terms}};
}

CDecomposition decomposition_from_json(const json& j) {
  CDecomposition d;
  const json& terms = j.is_array() ? j : j.at("terms");
  for (const auto& t : terms) {
    const json& l = t.at("lambda");
    d.terms.push_back({cplx(l.at(0).get<double>(), l.at(1).get<double>()), atom_from_json(t.at("atom"))});
  }
  if (j.is_object() && j.contains("target_grid")) {
    d.target_grid = grid_from_json(j.at("target_grid"));
  } else if (!d.terms.empty()) {
    d.target_grid = d.terms.front().atom.b.grid();
    for (const auto& t : d.terms) d.target_grid = hull(d.target_grid, t.atom.b.grid());
  }
  return d;
}

json to_json(const BmoReport& r) {
  return {{"norm", r.norm},
          {"argmax", {r.argmax.a, r.argmax.b}},
          {"side", to_string(r.side)},
          {"intervals_scanned", r.intervals_scanned}};
}

}  // namespace ncvharm
