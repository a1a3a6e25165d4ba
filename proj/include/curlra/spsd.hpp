#pragma once

#include "curlra/cur.hpp"
#include "curlra/volume.hpp"

#include <stdexcept>

namespace curlra {

// A diagonal residual went clearly negative during pivoted elimination.
struct NotSpsdError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The current principal submatrix has zero volume; the caller should
// restart with a larger candidate count K.
struct DegenerateVolumeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Update budget exhausted before reaching a locally maximal set; carries
// the best index set found so far.
struct UpdateBudgetError : std::runtime_error {
  UpdateBudgetError(const std::string& what, IndexSet best_set)
      : std::runtime_error(what), best(std::move(best_set)) {}
  IndexSet best;
};

// K = r generator is singular, so the inverse nucleus does not exist.
struct SingularGeneratorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ColumnSubset {
  IndexSet indices;  // ascending, possibly fewer than requested
  bool early_stop = false;
};

// Greedy column selection by largest residual norm with rank-one deflation
// after each pick.  Reads the whole matrix; superlinear by design, used as
// a quality yardstick.  Stops early (flagged) once the residual is zero.
ColumnSubset greedy_column_subset(const DenseMatrix& A, Index K);
ColumnSubset greedy_column_subset(const EntryOracle& A, Index K);

// Complete-pivoting elimination specialized to SPSD input, where the
// largest residual entry always sits on the diagonal.  Touches only the
// diagonal and the K pivot columns: O(nK) accesses.  Early termination on a
// vanishing pivot returns the shorter set with the flag raised.
ColumnSubset gecp_spsd(const EntryOracle& W, Index K);

// log of the r-projective volume ratio vol(W[J,J]) / vol(W[I,I]) where
// J = I - {i_out} + {j_in}.  For |I| == r this is a ratio of two Schur
// complements against the shared principal block and costs O(r^3) plus
// O(r) fresh entries; for |I| > r it falls back to two small SVDs.
double principal_volume_ratio(const EntryOracle& W, const IndexSet& I,
                              Index i_out, Index j_in, Index r);

// One update pass: scans removals i in I ascending, then insertions j
// outside I ascending, and returns the first swap that grows the
// r-projective volume of the principal submatrix by more than 1 + eps.
// Returns I unchanged when no such swap exists (local maximality).
IndexSet index_update(const EntryOracle& W, const IndexSet& I, Index r,
                      double eps);

struct SpsdConfig {
  Index r = 1;           // target rank
  Index K = 1;           // candidate set size, K >= r
  double eps = 0.1;      // relative improvement threshold
  int max_updates = -1;  // -1: derive the default bound from r, n, eps
};

int default_update_budget(Index r, Index n, double eps);

struct SpsdMainResult {
  IndexSet set;              // final index set, ascending
  int accepted_updates = 0;  // swaps that strictly improved the volume
  bool gecp_early_stop = false;
  std::size_t access_count = 0;  // distinct entries read, whole pipeline
};

// Full SPSD pipeline: pivoted-elimination initialization followed by update
// passes until a pass returns its input unchanged.  Throws
// UpdateBudgetError (with the best set) if the budget runs out first.
SpsdMainResult spsd_main(const EntryOracle& W, const SpsdConfig& cfg);

// Builds the canonical CUR factors on the principal generator W[I, I].
// Symmetry makes R a transpose of C, so only the C columns are fetched.
// K == r uses the plain inverse nucleus and throws SingularGeneratorError
// (advising K > r) when the generator is singular.
CurFactors build_cur_spsd(const EntryOracle& W, const IndexSet& I, Index r);

}  // namespace curlra
