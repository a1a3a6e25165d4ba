#include "curlra/matrix.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace curlra {

bool is_valid_index_set(const IndexSet& s, Index bound) {
  for (std::size_t a = 0; a < s.size(); ++a) {
    if (s[a] < 0 || s[a] >= bound) return false;
    if (a > 0 && s[a] <= s[a - 1]) return false;
  }
  return true;
}

double zero_threshold(Index m, Index n, double sigma1) {
  return double(std::max(m, n)) * std::numeric_limits<double>::epsilon() *
         sigma1;
}

Svd svd(const DenseMatrix& M) {
  Svd out;
  if (M.rows() == 0 || M.cols() == 0) {
    out.S = DenseMatrix(M.rows(), 0);
    out.sigma = Vector(0);
    out.T = DenseMatrix(M.cols(), 0);
    return out;
  }
  // Jacobi is the more accurate kernel and plenty fast at small sizes;
  // divide-and-conquer takes over above that.
  DenseMatrix U, V;
  Vector sv;
  if (std::min(M.rows(), M.cols()) <= 32) {
    Eigen::JacobiSVD<DenseMatrix> dec(M,
                                      Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success)
      throw std::runtime_error("svd: decomposition failed to converge");
    U = dec.matrixU();
    V = dec.matrixV();
    sv = dec.singularValues();
  } else {
    Eigen::BDCSVD<DenseMatrix> dec(M,
                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success)
      throw std::runtime_error("svd: decomposition failed to converge");
    U = dec.matrixU();
    V = dec.matrixV();
    sv = dec.singularValues();
  }
  const double cutoff = zero_threshold(M.rows(), M.cols(), sv.size() ? sv(0) : 0.0);
  Index rho = 0;
  while (rho < sv.size() && sv(rho) > cutoff) ++rho;
  out.S = U.leftCols(rho);
  out.sigma = sv.head(rho);
  out.T = V.leftCols(rho);
  out.rho = rho;
  return out;
}

Norms norms(const DenseMatrix& M) {
  Norms out;
  if (M.size() == 0) return out;
  out.frobenius = M.norm();
  out.chebyshev = M.cwiseAbs().maxCoeff();
  if (out.frobenius == 0.0) return out;
  const Svd dec = svd(M);
  out.spectral = dec.rho ? dec.sigma(0) : 0.0;
  return out;
}

DenseMatrix pseudo_inverse(const DenseMatrix& M) {
  const Svd dec = svd(M);
  if (dec.rho == 0) return DenseMatrix::Zero(M.cols(), M.rows());
  return dec.T * dec.sigma.cwiseInverse().asDiagonal() * dec.S.transpose();
}

DenseMatrix rank_truncation(const DenseMatrix& M, Index r) {
  if (r < 0) throw std::invalid_argument("rank_truncation: negative rank");
  const Svd dec = svd(M);
  const Index rr = std::min(r, dec.rho);
  if (rr == 0) return DenseMatrix::Zero(M.rows(), M.cols());
  return dec.S.leftCols(rr) * dec.sigma.head(rr).asDiagonal() *
         dec.T.leftCols(rr).transpose();
}

Index numerical_rank(const DenseMatrix& M, double eps) {
  const Svd dec = svd(M);
  if (dec.rho == 0) return 0;
  const double cut = eps * dec.sigma(0);
  Index r = 0;
  while (r < dec.rho && dec.sigma(r) > cut) ++r;
  return r;
}

DenseMatrix truncated_pseudo_inverse(const DenseMatrix& M, Index r) {
  if (r < 0)
    throw std::invalid_argument("truncated_pseudo_inverse: negative rank");
  const Svd dec = svd(M);
  const Index rr = std::min(r, dec.rho);
  if (rr == 0) return DenseMatrix::Zero(M.cols(), M.rows());
  return dec.T.leftCols(rr) * dec.sigma.head(rr).cwiseInverse().asDiagonal() *
         dec.S.leftCols(rr).transpose();
}

void write_matrix(const std::string& path, const DenseMatrix& M) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_matrix: cannot open " + path);
  out << M.rows() << " " << M.cols() << "\n";
  char buf[64];
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", M(i, j));
      out << buf << (j + 1 < M.cols() ? " " : "");
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_matrix: write failed on " + path);
}

DenseMatrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_matrix: cannot open " + path);
  Index m = -1, n = -1;
  if (!(in >> m >> n) || m < 0 || n < 0)
    throw std::runtime_error("read_matrix: bad header in " + path);
  DenseMatrix M(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) {
      double v;
      if (!(in >> v))
        throw std::runtime_error("read_matrix: truncated data in " + path);
      if (!std::isfinite(v))
        throw std::runtime_error("read_matrix: non-finite entry in " + path);
      M(i, j) = v;
    }
  return M;
}

}  // namespace curlra
