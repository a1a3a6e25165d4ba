#pragma once

#include "curlra/cur.hpp"
#include "curlra/volume.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace curlra {

// Exhaustive searches and adversarial constructions used to judge the fast
// algorithms.  Everything here is deliberately superlinear.

struct BruteResult {
  IndexSet rows, cols;
  LogVolume vol;  // r-projective volume of the winning submatrix
};

// Exhaustive r-projective volume maximization over all k-row, l-column
// submatrices.  Guarded: C(m,k) * C(n,l) must not exceed 10^7.
BruteResult brute_force_max_volume(const DenseMatrix& W, Index k, Index l,
                                   Index r);
// Restricted searches: fixed rows, fixed columns, or principal (I == J).
BruteResult brute_force_max_volume_rows_fixed(const DenseMatrix& W,
                                              const IndexSet& rows, Index l,
                                              Index r);
BruteResult brute_force_max_volume_cols_fixed(const DenseMatrix& W, Index k,
                                              const IndexSet& cols, Index r);
BruteResult brute_force_max_volume_principal(const DenseMatrix& W, Index k,
                                             Index r);

struct OptimalError {
  double spectral = 0.0;   // sigma_{r+1}
  double frobenius = 0.0;  // sqrt(sum of squared tail singular values)
};

// Best achievable rank-r error in spectral and Frobenius norm.
OptimalError optimal_error(const DenseMatrix& W, Index r);

// Family of matrices indistinguishable from the null matrix under any
// fixed sublinear access pattern: the null matrix itself plus one
// delta matrix per cell, optionally perturbed or shifted by a fixed
// low-rank base.
class AdversarialFamily {
 public:
  enum class Kind { kDelta, kDeltaPerturbed, kDeltaPlusLowRank };

  AdversarialFamily(Index m, Index n, Kind kind, std::uint64_t seed);

  // Member 0 is the base (null or low-rank) matrix; member 1 + i*n + j has
  // the delta at cell (i, j).
  std::size_t size() const { return std::size_t(m_ * n_) + 1; }
  EntryOracle member(std::size_t idx) const;
  double delta_value() const { return 1.0; }

 private:
  Index m_, n_;
  Kind kind_;
  std::uint64_t seed_;
  DenseMatrix base_;     // zero or the fixed low-rank shift
  DenseMatrix perturb_;  // zero or the fixed small perturbation
};

using ApproxProcedure = std::function<DenseMatrix(const EntryOracle&)>;

struct AdversaryReport {
  bool sublinear = false;        // procedure left at least one cell unread
  bool within_budget = false;    // accesses stayed at or under the budget
  std::size_t accesses = 0;      // distinct reads on the null run
  Index witness_i = -1, witness_j = -1;  // first unread cell, row-major
  bool outputs_identical = false;  // same output on null and delta inputs
  double err_null = 0.0;   // Chebyshev error of the null-run output vs O
  double err_delta = 0.0;  // Chebyshev error of the delta-run output
  std::string summary;     // one-paragraph plain-text verdict
};

// Runs the procedure on the null matrix, finds a cell it never read, and
// reruns on the delta matrix at that cell.  A procedure whose access
// pattern is a deterministic function of the oracle responses reads the
// same cells in both runs and returns bit-identical output, so one of the
// two errors is at least delta/2.  If the procedure reads everything, the
// report plainly states it is not sublinear and no witness exists.
// budget must be below m*n; the report records whether it was respected.
AdversaryReport adversary_demo(Index m, Index n,
                               const ApproxProcedure& procedure,
                               std::size_t budget);

struct TheoremCheck {
  std::string name;
  std::uint64_t seed = 0;
  double margin = 0.0;  // worst slack observed; negative means violated
  bool pass = false;
};

struct TheoremSuiteResult {
  std::vector<TheoremCheck> checks;
  int passed = 0, failed = 0;
  std::string ledger;  // one line per check: name, seed, margin, verdict
};

// Randomized verification of the volume and error identities the fast
// algorithms rely on, plus fixed regression instances.  Failures are
// reported as data, not thrown.
TheoremSuiteResult theorem_suite(std::uint64_t seed, int trials);

}  // namespace curlra
