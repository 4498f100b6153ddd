#pragma once

#include <string>

#include "json.hpp"
#include "ncvharm/bmo.hpp"
#include "ncvharm/hardy.hpp"

namespace ncvharm {

using json = nlohmann::json;

// %.17g, so binary64 values round-trip exactly.
std::string format_double(double v);
// Compact JSON text with floating values written by format_double.
std::string dump_json(const json& j);

json to_json(const Mat& m);  // row-major list of [re, im]
Mat mat_from_json(const json& j, Eigen::Index rows, Eigen::Index cols);

json to_json(const Grid& g);
Grid grid_from_json(const json& j);

json to_json(const GridFn& f);
GridFn gridfn_from_json(const json& j);

json to_json(const CAtom& a);
CAtom atom_from_json(const json& j);

json to_json(const CDecomposition& d);
CDecomposition decomposition_from_json(const json& j);

json to_json(const BmoReport& r);

}  // namespace ncvharm
