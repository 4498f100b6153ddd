#pragma once

#include <cstdint>
#include <random>

#include "ncvharm/hardy.hpp"

namespace ncvharm {

using Rng = std::mt19937_64;

// Independent stream for item `index` of a corpus seeded by `seed`.
Rng item_rng(std::uint64_t seed, std::uint64_t index);

Mat random_mat(Rng& rng, Eigen::Index rows, Eigen::Index cols);
Mat random_psd(Rng& rng, Eigen::Index n);
// Random matrix with unit Hilbert-Schmidt norm.
Mat random_unit_hs(Rng& rng, Eigen::Index rows, Eigen::Index cols);

// Independent Gaussian matrix per cell.
GridFn random_gridfn(Rng& rng, const Grid& g, Eigen::Index rows, Eigen::Index cols);
// Step function with a few random constant pieces (2..max_pieces) over the window.
GridFn random_steps(Rng& rng, const Grid& g, Eigen::Index n, int max_pieces);
// Random function minus its mean over the window.
GridFn random_mean_zero(Rng& rng, const Grid& g, Eigen::Index n);

// Grid-aligned interval of 2..max_cells cells inside the window.
Interval random_aligned_interval(Rng& rng, const Grid& g, std::size_t max_cells);

// Valid c-atom on a random aligned interval of g; `fill` in (0, 1] scales ||b||_2 |I|^{1/2}.
CAtom random_atom(Rng& rng, const Grid& g, Eigen::Index n, std::size_t max_cells, double min_fill = 0.1);
// Atom on the given aligned interval.
CAtom random_atom_on(Rng& rng, const Grid& g, const Interval& I, Eigen::Index n, double min_fill = 0.1);

// Cell averages of sum_k A_k sin^2(pi u) cos(k pi u), u the position in the support (zero outside).
GridFn random_smooth(Rng& rng, const Grid& g, const Interval& support, Eigen::Index n, int modes = 3);

}  // namespace ncvharm
