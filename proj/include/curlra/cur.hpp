#pragma once

#include "curlra/oracle.hpp"

#include <cstdint>

namespace curlra {

// CUR factors W ~= C * U * R with C = W[:, cols] and R = W[rows, :] actual
// submatrices of W.  U is the nucleus, normally the pseudo-inverse of the
// rank-r truncation of the generator W[rows, cols].
struct CurFactors {
  IndexSet rows;   // generator rows, ascending
  IndexSet cols;   // generator columns, ascending
  DenseMatrix C;   // m x |cols|
  DenseMatrix U;   // |cols| x |rows|
  DenseMatrix R;   // |rows| x n
  Index rank = 0;  // target rank of the nucleus truncation

  DenseMatrix densify() const { return C * U * R; }
};

// Exact Chebyshev error max |W - CUR| by full traversal.  Reads W through
// peek(), i.e. deliberately outside access accounting: this is a test-side
// measurement, not part of any sublinear pipeline.
double cheb_error(const EntryOracle& W, const CurFactors& cur);

struct ErrorEstimate {
  double chebyshev = 0.0;  // max residual over the sample
  double frobenius = 0.0;  // rms residual scaled to the full matrix
};

// Samples `samples` uniform entries (counted accesses) and reports the max
// and scaled-rms residual of W - CUR over the sample.
ErrorEstimate verify_error(const EntryOracle& W, const CurFactors& cur,
                           int samples, std::uint64_t seed);

}  // namespace curlra
