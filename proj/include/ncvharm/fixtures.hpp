#pragma once

// Frozen regression constants, measured by tools/measure_constants
// (seed 20261014, 1000 items per corpus check; disjoint from the suite seeds).
// Bump kVersion whenever a value changes.

namespace ncvharm::fixtures {

inline constexpr int kVersion = 1;

// sum |lambda| / ||f||_{L2((1+t^2)dt)} for Meyer decompositions of random mean-zero f on
// [-4, 4], n = 2. Observed max 2.18721 over 1000 functions; rounded up.
inline constexpr double kMeyerConstant = 2.2;

// ||G_c(a)||_1 for single random atoms on [-2, 2], 48 log-spaced heights.
// Observed max 0.75670 over 1000 atoms; rounded up.
inline constexpr double kLittlewoodPaleyConstant = 0.8;

// Hormander constant at lambda = 4 of the mollified Hilbert kernel, m in {4, 8, 16, 32}.
// Observed 0.6620, 0.6527, 0.6601, 0.6590 (and 0.6539 at m = 64); rounded up.
inline constexpr double kMollifiedHormander = 0.7;

// Power-iteration norm of the truncated Hilbert transform on 256 cells of width 1/16
// (seed 1, relative tolerance 1e-8, at most 2000 iterations). Regression value, compared to 1e-9 relative.
inline constexpr double kHilbertProbeNorm = 3.1380256800254895;

// ||G_c||_1 of the +-1 step pair on [0, 2] with 48 heights. Regression value.
inline constexpr double kStepPairGL1 = 1.9672333701574807;

// Weighted molecule ratio of an atom: at most sqrt(5/4) since |x - x0| <= d/2 on its support.
// Observed max 1.05659 over 1000 atoms.
inline constexpr double kMoleculeConstant = 1.118033988749895;

}  // namespace ncvharm::fixtures
