#pragma once

#include "curlra/matrix.hpp"

namespace curlra {

// Volumes are products of singular values and under/overflow fast, so they
// are carried in log space.  A volume below the rank cutoff is flagged
// is_zero and its log_value is meaningless.
struct LogVolume {
  bool is_zero = true;
  double log_value = 0.0;
};

// Product of all min(k,l) singular values of a k x l matrix.
LogVolume volume(const DenseMatrix& M);

// Product of the r leading singular values.  Requires r <= min(k,l).
LogVolume projective_volume(const DenseMatrix& M, Index r);

// log(a/b); both must be nonzero.
double volume_ratio_log(const LogVolume& a, const LogVolume& b);

// True when a exceeds b by a factor strictly greater than 1 + eps.
// A zero a never improves; a nonzero a always improves on a zero b.
bool volume_improves(const LogVolume& a, const LogVolume& b, double eps);

}  // namespace curlra
