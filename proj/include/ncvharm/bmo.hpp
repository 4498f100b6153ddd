#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncvharm/gridfn.hpp"

namespace ncvharm {

enum class Side { column, row };
std::string to_string(Side s);

struct Search {
  enum class Kind { aligned_all, dyadic, windows } kind = Kind::aligned_all;
  int shifts = 0;  // number of endpoint offsets per side for `windows`

  static Search aligned_all() { return {Kind::aligned_all, 0}; }
  static Search dyadic() { return {Kind::dyadic, 0}; }
  static Search windows(int k) { return {Kind::windows, k}; }
};

struct BmoReport {
  double norm = 0.0;
  Interval argmax{0.0, 1.0};
  Side side = Side::column;
  std::uint64_t intervals_scanned = 0;
  // For the windows search: the aligned-family value before refinement.
  double aligned_norm = 0.0;
};

// Mean-square oscillation ||(1/|I| int_I (f - f_I)^*(f - f_I))^{1/2}||_inf; row side uses f^*.
// Parts of the interval outside the window contribute the value zero.
double oscillation(const GridFn& f, const Interval& iv, Side side);

// Supremum of the oscillation over an interval family contained in the window of f.
BmoReport bmo_norm(const GridFn& f, Side side, Search search = Search::aligned_all());

struct GarnettPiece {
  Interval source;     // J_n inside J
  Interval reflected;  // K_n outside J
};

// Ladder pieces (both sides) for a grid-aligned J with 3 * 2^K cells, K >= 1.
std::vector<GarnettPiece> garnett_ladder(const Grid& lattice, const Interval& J);

// Truncation psi of phi around J on the 5J grid: phi - phi_J on J, ladder means on the
// reflected pieces, zero elsewhere.
GridFn garnett_truncate(const GridFn& phi, const Interval& J);

}  // namespace ncvharm
