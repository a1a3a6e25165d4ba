#pragma once

#include "curlra/matrix.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <unordered_set>

namespace curlra {

// Entrywise access to a matrix that may never be materialized.  Every
// distinct (i, j) looked up through operator() is recorded once; the counter
// is what the sublinear-cost claims are measured against.  peek() reads an
// entry without recording it and exists only for test instrumentation that
// explicitly excludes itself from access accounting.
class EntryOracle {
 public:
  EntryOracle(Index m, Index n, std::function<double(Index, Index)> entry);

  double operator()(Index i, Index j) const;
  double peek(Index i, Index j) const;

  Index rows() const { return m_; }
  Index cols() const { return n_; }

  std::size_t access_count() const;
  bool was_accessed(Index i, Index j) const;
  void reset_counter() const;

  // Counted bulk reads.
  Vector fetch_row(Index i, const IndexSet& cols) const;
  Vector fetch_col(Index j, const IndexSet& rows) const;
  DenseMatrix fetch_block(const IndexSet& rows, const IndexSet& cols) const;

  // Reads every entry (counted).  Only sensible at test scale.
  DenseMatrix densify() const;

 private:
  Index m_, n_;
  std::function<double(Index, Index)> entry_;
  mutable std::mutex mutex_;
  mutable std::unordered_set<std::uint64_t> seen_;
};

EntryOracle dense_oracle(DenseMatrix M);
EntryOracle null_oracle(Index m, Index n);
EntryOracle delta_oracle(Index m, Index n, Index i, Index j);

// Cauchy matrix 1 / (x_i - y_j).  Node sets must be disjoint.
EntryOracle cauchy_oracle(std::vector<double> x, std::vector<double> y);
// Default nodes x_i = i + 1, y_j = j + 1.5.
EntryOracle cauchy_oracle(Index n);

// Implicit SPSD matrix Q diag(lambda) Q^T with Q a seeded orthonormal
// factor; each entry costs O(#lambda) flops, no n x n array ever exists.
// Spectrum is geometric: lambda_t = ratio^t, truncated at machine noise.
EntryOracle spsd_oracle(Index n, double ratio, std::uint64_t seed);

// Singular values of the implicit SPSD generator above, descending, same
// truncation; used to check recovery against the known spectrum.
Vector spsd_oracle_spectrum(Index n, double ratio);

// Dense m x n matrix of exact rank r with a seeded random factorization.
DenseMatrix random_rank_matrix(Index m, Index n, Index r, std::uint64_t seed);

// Dense SPSD matrix with prescribed spectrum (seeded random eigenbasis).
DenseMatrix random_spsd_matrix(const Vector& spectrum, std::uint64_t seed);

// Random orthonormal m x k factor (QR of a seeded Gaussian block).
DenseMatrix random_orthonormal(Index m, Index k, std::uint64_t seed);

}  // namespace curlra
