#include "curlra/cur.hpp"

#include "curlra/detail/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace curlra {

double cheb_error(const EntryOracle& W, const CurFactors& cur) {
  const Index m = W.rows(), n = W.cols();
  if (cur.C.rows() != m || cur.R.cols() != n)
    throw std::invalid_argument("cheb_error: factor shapes do not match W");
  const DenseMatrix CU = cur.C * cur.U;  // m x |rows|
  double worst = 0.0;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) {
      const double approx = CU.row(i).dot(cur.R.col(j));
      worst = std::max(worst, std::abs(W.peek(i, j) - approx));
    }
  return worst;
}

ErrorEstimate verify_error(const EntryOracle& W, const CurFactors& cur,
                           int samples, std::uint64_t seed) {
  if (samples < 1)
    throw std::invalid_argument("verify_error: need at least one sample");
  const Index m = W.rows(), n = W.cols();
  const DenseMatrix CU = cur.C * cur.U;
  detail::Rng rng(detail::mix_seed(seed, 0xe44e));
  double worst = 0.0, sq = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Index i = Index(rng.uniform_index(std::uint64_t(m)));
    const Index j = Index(rng.uniform_index(std::uint64_t(n)));
    const double resid = W(i, j) - CU.row(i).dot(cur.R.col(j));
    worst = std::max(worst, std::abs(resid));
    sq += resid * resid;
  }
  ErrorEstimate out;
  out.chebyshev = worst;
  out.frobenius = std::sqrt(sq / double(samples)) *
                  std::sqrt(double(m) * double(n));
  return out;
}

}  // namespace curlra
