#include "curlra/volume.hpp"

#include <cmath>
#include <stdexcept>

namespace curlra {

namespace {

LogVolume from_leading(const Svd& dec, Index count) {
  LogVolume v;
  if (dec.rho < count) return v;  // a dropped singular value is a zero factor
  v.is_zero = false;
  double acc = 0.0;
  for (Index j = 0; j < count; ++j) acc += std::log(dec.sigma(j));
  v.log_value = acc;
  return v;
}

}  // namespace

LogVolume volume(const DenseMatrix& M) {
  return from_leading(svd(M), std::min(M.rows(), M.cols()));
}

LogVolume projective_volume(const DenseMatrix& M, Index r) {
  if (r < 0 || r > std::min(M.rows(), M.cols()))
    throw std::invalid_argument(
        "projective_volume: r outside [0, min(rows, cols)]");
  if (r == 0) return LogVolume{false, 0.0};  // empty product
  return from_leading(svd(M), r);
}

double volume_ratio_log(const LogVolume& a, const LogVolume& b) {
  if (a.is_zero || b.is_zero)
    throw std::invalid_argument("volume_ratio_log: zero volume");
  return a.log_value - b.log_value;
}

bool volume_improves(const LogVolume& a, const LogVolume& b, double eps) {
  if (a.is_zero) return false;
  if (b.is_zero) return true;
  return a.log_value - b.log_value > std::log1p(eps);
}

}  // namespace curlra
