#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ncvharm/gridfn.hpp"

namespace ncvharm {

// c-atom a = b h with b supported in I, int_I b = 0, ||b||_2 <= |I|^{-1/2}, ||h||_2 = 1.
struct CAtom {
  GridFn b;
  Mat h;
  Interval I;

  GridFn value() const { return right_multiply(b, h); }
};

struct AtomReport {
  bool valid = false;
  bool support_ok = false;
  bool mean_zero_ok = false;
  bool norm_ok = false;
  bool h_ok = false;
  bool holder_ok = false;
  double support_leak = 0.0;  // L2 mass of b outside I
  double mean_norm = 0.0;     // ||int_I b||_2
  double norm_slack = 0.0;    // ||b||_2 |I|^{1/2}; at most 1 for atoms
  double h_norm = 0.0;
  double l1_norm = 0.0;       // ||b h||_{L1(S1)}
};

AtomReport validate_atom(const CAtom& a);

struct ColumnFactorization {
  GridFn F;
  Mat beta;  // (int f^* f)^{1/4}
};

// f = F beta with ||F||_2 ||beta||_2 = tr (int f^* f)^{1/2}.
ColumnFactorization factorize_column(const GridFn& f);

struct AnnulusRecord {
  int j = 0;
  double radius = 0.0;  // 2^j
  Mat integral;         // int over the annulus
  Mat tail;             // sum of annulus integrals from j on
  double lambda = 0.0;
};

struct MeyerTerm {
  int j = 0;
  double lambda = 0.0;
  GridFn b;  // supported on [-2^{j+1}, 2^{j+1}], mean zero, ||b||_2 = |supp|^{-1/2}
  Interval support;
};

struct MeyerResult {
  std::vector<MeyerTerm> terms;
  std::vector<AnnulusRecord> trace;
};

// Dyadic-annulus decomposition of a mean-zero function. The lattice must contain +-2^j.
MeyerResult meyer_decompose(const GridFn& F);

struct CTerm {
  cplx lambda;
  CAtom atom;
};

struct CDecomposition {
  std::vector<CTerm> terms;
  Grid target_grid;

  double abs_lambda_sum() const;
  GridFn reconstruct() const;
};

CDecomposition c_decompose(const GridFn& f, bool center_to_mean_zero = false);

struct MoleculeReport {
  double weighted_norm = 0.0;  // (int ||f||_2^2 (1 + |x - x0|^2 / d^2))^{1/2}
  double ratio = 0.0;          // weighted_norm * d^{1/2}
  double mean_norm = 0.0;
  bool mean_zero = false;
  bool pass = false;           // ratio <= 1 + 1e-12 and mean zero
  bool pass_with(double constant) const { return mean_zero && ratio <= constant * (1.0 + 1e-12); }
};

MoleculeReport molecule_check(const GridFn& f, double x0, double d);

// int tau(phi(t) b(t) h) dt.
cplx duality_pair(const GridFn& phi, const CAtom& a);

// Atom on a grid-aligned I whose pairing with phi equals the row oscillation on I.
CAtom extremal_atom(const GridFn& phi, const Interval& I);

struct MollifiedAtom {
  std::vector<std::pair<double, CAtom>> combination;  // weights sum to 2
  std::optional<double> residual_coeff;
  std::optional<CAtom> residual;  // phi_n * a - a = residual_coeff * residual
  std::string notice;
};

MollifiedAtom mollify_atom(const CAtom& a, int n);

}  // namespace ncvharm
