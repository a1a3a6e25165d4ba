#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace curlra {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Ordered, duplicate-free list of row or column indices, stored ascending.
using IndexSet = std::vector<Index>;

bool is_valid_index_set(const IndexSet& s, Index bound);

// Compact SVD: only singular values above the rank cutoff are kept, so
// sigma.size() == rho and S, T have exactly rho orthonormal columns.
struct Svd {
  DenseMatrix S;  // m x rho
  Vector sigma;   // rho, descending, strictly positive
  DenseMatrix T;  // n x rho
  Index rho = 0;
};

struct Norms {
  double spectral = 0.0;
  double frobenius = 0.0;
  double chebyshev = 0.0;
};

// Rank cutoff used everywhere: sigma_j <= max(m,n) * eps * sigma_1 counts
// as zero.  Returns the absolute threshold for a given leading value.
double zero_threshold(Index m, Index n, double sigma1);

Svd svd(const DenseMatrix& M);
Norms norms(const DenseMatrix& M);
DenseMatrix pseudo_inverse(const DenseMatrix& M);
DenseMatrix rank_truncation(const DenseMatrix& M, Index r);
Index numerical_rank(const DenseMatrix& M, double eps);

// Pseudo-inverse of the rank-r truncation of M: the canonical nucleus.
DenseMatrix truncated_pseudo_inverse(const DenseMatrix& M, Index r);

// Text matrix file: first line "m n", then m lines of n floats written with
// 17 significant digits so write/read round-trips exactly.
void write_matrix(const std::string& path, const DenseMatrix& M);
DenseMatrix read_matrix(const std::string& path);

}  // namespace curlra
