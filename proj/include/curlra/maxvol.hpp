#pragma once

#include "curlra/volume.hpp"

#include <optional>

namespace curlra {

// Within a k x q row strip, picks l columns whose k x l submatrix has
// locally maximal r-projective volume: column-pivoted QR seeds the set, then
// single-column swaps are applied while some swap grows the volume by more
// than 1 + delta.  A q x l strip is handled by the transposed problem, so
// the same entry point selects rows as well.  When a warm-start set is
// given, the better of it and the QR seed is refined.
//
// The returned set is ascending.  delta defaults to 1e-3.
IndexSet maxvol_submatrix(const DenseMatrix& strip, Index k, Index l, Index r,
                          const std::optional<IndexSet>& warm = std::nullopt,
                          double delta = 1e-3);

enum class Orientation { kRows, kCols };

// Reduces volume-maximization over an r x n (or m x r) full-rank factor of
// W to the strip problem above: a QR factor of W has the same projective
// volumes on every index set, so selecting on the triangular factor selects
// for W itself.  W must have numerical rank exactly r.
IndexSet projective_to_volume(const DenseMatrix& W, Index r, Index l,
                              Orientation select);

}  // namespace curlra
