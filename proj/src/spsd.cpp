#include "curlra/spsd.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace curlra {

namespace {

IndexSet all_indices(Index n) {
  IndexSet s(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) s[std::size_t(i)] = i;
  return s;
}

bool contains(const IndexSet& s, Index v) {
  return std::binary_search(s.begin(), s.end(), v);
}

}  // namespace

ColumnSubset greedy_column_subset(const DenseMatrix& A, Index K) {
  if (K < 0 || K > A.cols())
    throw std::invalid_argument("greedy_column_subset: bad K");
  DenseMatrix M = A;
  const Index n = M.cols();
  Vector nsq(n);
  for (Index j = 0; j < n; ++j) nsq(j) = M.col(j).squaredNorm();
  const double tol =
      zero_threshold(A.rows(), A.cols(), std::sqrt(nsq.maxCoeff()));
  const double tol_sq = tol * tol;

  ColumnSubset out;
  std::vector<char> picked(std::size_t(n), 0);
  for (Index t = 0; t < K; ++t) {
    Index p = -1;
    double best = tol_sq;
    for (Index j = 0; j < n; ++j)
      if (!picked[std::size_t(j)] && nsq(j) > best) {
        best = nsq(j);
        p = j;
      }
    if (p < 0) {
      out.early_stop = true;
      break;
    }
    picked[std::size_t(p)] = 1;
    out.indices.push_back(p);
    // Deflate: remove the span of the chosen column from the residual.
    const Vector v = M.col(p);
    const Eigen::RowVectorXd coeff = v.transpose() * M / v.squaredNorm();
    M.noalias() -= v * coeff;
    for (Index j = 0; j < n; ++j) nsq(j) = M.col(j).squaredNorm();
  }
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

ColumnSubset greedy_column_subset(const EntryOracle& A, Index K) {
  // The residual update needs whole columns, so this path reads everything
  // up front (counted); greedy selection is a yardstick, not sublinear.
  return greedy_column_subset(A.densify(), K);
}

ColumnSubset gecp_spsd(const EntryOracle& W, Index K) {
  const Index n = W.rows();
  if (W.cols() != n)
    throw std::invalid_argument("gecp_spsd: matrix must be square");
  if (K < 1 || K > n) throw std::invalid_argument("gecp_spsd: bad K");

  // For SPSD input the largest entry of every elimination residual sits on
  // the diagonal, so complete pivoting only ever inspects the diagonal plus
  // the chosen pivot columns: a left-looking partial Cholesky.
  Vector d(n);
  for (Index i = 0; i < n; ++i) d(i) = W(i, i);
  const double tol = zero_threshold(n, n, d.cwiseAbs().maxCoeff());

  ColumnSubset out;
  std::vector<Vector> cols;
  std::vector<double> pivots;
  std::vector<char> used(std::size_t(n), 0);
  const IndexSet rows = all_indices(n);
  for (Index t = 0; t < K; ++t) {
    Index p = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i)
      if (!used[std::size_t(i)] && d(i) > best) {
        best = d(i);
        p = i;
      }
    if (best < -10.0 * tol)
      throw NotSpsdError(
          "gecp_spsd: residual diagonal went negative; input is not SPSD");
    if (best <= tol) {
      out.early_stop = true;
      break;
    }
    Vector c = W.fetch_col(p, rows);
    for (std::size_t s = 0; s < cols.size(); ++s)
      c.noalias() -= cols[s] * (cols[s](p) / pivots[s]);
    const double piv = c(p);
    if (piv <= tol) {  // cancellation drained the pivot; same exit as above
      out.early_stop = true;
      break;
    }
    for (Index i = 0; i < n; ++i) d(i) -= c(i) * c(i) / piv;
    d(p) = 0.0;
    used[std::size_t(p)] = 1;
    cols.push_back(std::move(c));
    pivots.push_back(piv);
    out.indices.push_back(p);
  }
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

namespace {

// Schur complement of the shared block S inside W restricted to S + {x}.
// With an empty S this is just the diagonal entry.
double schur_complement(const EntryOracle& W, const IndexSet& S,
                        const Eigen::LDLT<DenseMatrix>& ldlt, Index x) {
  const double dxx = W(x, x);
  if (S.empty()) return dxx;
  const Vector wx = W.fetch_col(x, S);
  return dxx - wx.dot(ldlt.solve(wx));
}

LogVolume principal_projective_volume(const EntryOracle& W, const IndexSet& I,
                                      Index r) {
  return projective_volume(W.fetch_block(I, I), r);
}

double log_ratio_or_inf(const LogVolume& num, const LogVolume& den) {
  if (num.is_zero)
    return -std::numeric_limits<double>::infinity();
  if (den.is_zero) return std::numeric_limits<double>::infinity();
  return num.log_value - den.log_value;
}

}  // namespace

double principal_volume_ratio(const EntryOracle& W, const IndexSet& I,
                              Index i_out, Index j_in, Index r) {
  const Index K = Index(I.size());
  if (!is_valid_index_set(I, W.rows()) || r < 1 || r > K)
    throw std::invalid_argument("principal_volume_ratio: bad index set or r");
  if (!contains(I, i_out) || contains(I, j_in))
    throw std::invalid_argument(
        "principal_volume_ratio: i_out must be in I, j_in outside");

  IndexSet J;
  for (Index v : I)
    if (v != i_out) J.push_back(v);
  IndexSet S = J;  // shared block
  J.push_back(j_in);
  std::sort(J.begin(), J.end());

  if (K == r) {
    // vol(S + {x}) = vol(S) * schur(x), so the shared factor cancels and
    // the ratio is a quotient of two Schur complements.
    Eigen::LDLT<DenseMatrix> ldlt;
    bool ok = true;
    if (!S.empty()) {
      ldlt.compute(W.fetch_block(S, S));
      ok = ldlt.info() == Eigen::Success && ldlt.isPositive();
    }
    if (ok) {
      const double s_out = schur_complement(W, S, ldlt, i_out);
      const double s_in = schur_complement(W, S, ldlt, j_in);
      if (s_out > 0.0 && s_in > 0.0) return std::log(s_in) - std::log(s_out);
      if (s_out > 0.0 && s_in <= 0.0)
        return -std::numeric_limits<double>::infinity();
    }
    // Degenerate shared block: recompute both volumes outright.
  }
  return log_ratio_or_inf(principal_projective_volume(W, J, r),
                          principal_projective_volume(W, I, r));
}

IndexSet index_update(const EntryOracle& W, const IndexSet& I, Index r,
                      double eps) {
  const Index n = W.rows();
  const Index K = Index(I.size());
  if (!is_valid_index_set(I, n) || r < 1 || r > K)
    throw std::invalid_argument("index_update: bad index set or r");
  if (!(eps > 0.0)) throw std::invalid_argument("index_update: need eps > 0");

  const LogVolume vol_I = principal_projective_volume(W, I, r);
  if (vol_I.is_zero)
    throw DegenerateVolumeError(
        "index_update: current principal volume is zero; restart with a "
        "larger candidate count K");

  const double gate = std::log1p(eps);
  std::vector<char> in_I(std::size_t(n), 0);
  for (Index v : I) in_I[std::size_t(v)] = 1;

  for (Index a = 0; a < K; ++a) {
    const Index i_out = I[std::size_t(a)];
    IndexSet S;
    for (Index v : I)
      if (v != i_out) S.push_back(v);

    if (K == r) {
      // One factorization of the shared block serves every candidate.
      Eigen::LDLT<DenseMatrix> ldlt;
      bool ok = true;
      if (!S.empty()) {
        ldlt.compute(W.fetch_block(S, S));
        ok = ldlt.info() == Eigen::Success && ldlt.isPositive();
      }
      double s_out = 0.0;
      if (ok) {
        s_out = schur_complement(W, S, ldlt, i_out);
        ok = s_out > 0.0;
      }
      for (Index j = 0; j < n; ++j) {
        if (in_I[std::size_t(j)]) continue;
        double gain;
        if (ok) {
          const double s_in = schur_complement(W, S, ldlt, j);
          if (s_in <= 0.0) continue;
          gain = std::log(s_in) - std::log(s_out);
        } else {
          gain = principal_volume_ratio(W, I, i_out, j, r);
        }
        if (gain > gate) {
          IndexSet J = S;
          J.push_back(j);
          std::sort(J.begin(), J.end());
          return J;
        }
      }
    } else {
      for (Index j = 0; j < n; ++j) {
        if (in_I[std::size_t(j)]) continue;
        IndexSet J = S;
        J.push_back(j);
        std::sort(J.begin(), J.end());
        const LogVolume vol_J = principal_projective_volume(W, J, r);
        if (volume_improves(vol_J, vol_I, eps)) return J;
      }
    }
  }
  return I;
}

int default_update_budget(Index r, Index n, double eps) {
  const double ln2 = std::log(2.0);
  const double steps =
      (double(r) * double(r - 1) * ln2 + double(r) * std::log(double(std::max<Index>(n, 2)))) /
      std::log1p(eps);
  return 4 * int(std::ceil(steps));
}

SpsdMainResult spsd_main(const EntryOracle& W, const SpsdConfig& cfg) {
  const Index n = W.rows();
  if (cfg.r < 1 || cfg.r > cfg.K || cfg.K > n)
    throw std::invalid_argument("spsd_main: need 1 <= r <= K <= n");
  if (!(cfg.eps > 0.0)) throw std::invalid_argument("spsd_main: need eps > 0");

  const std::size_t before = W.access_count();
  SpsdMainResult out;

  const ColumnSubset init = gecp_spsd(W, cfg.K);
  out.gecp_early_stop = init.early_stop;
  IndexSet I = init.indices;
  if (Index(I.size()) < cfg.r)
    throw DegenerateVolumeError(
        "spsd_main: initialization found numerical rank below r; restart "
        "with a larger candidate count K");
  // Early termination can hand back fewer than K candidates; the update
  // passes then run at that reduced size.

  const int budget = cfg.max_updates < 0
                         ? default_update_budget(cfg.r, n, cfg.eps)
                         : cfg.max_updates;
  for (;;) {
    IndexSet J = index_update(W, I, cfg.r, cfg.eps);
    if (J == I) break;
    if (out.accepted_updates >= budget)
      throw UpdateBudgetError(
          "spsd_main: update budget exhausted before local maximality", I);
    I = std::move(J);
    ++out.accepted_updates;
  }
  out.set = std::move(I);
  out.access_count = W.access_count() - before;
  return out;
}

CurFactors build_cur_spsd(const EntryOracle& W, const IndexSet& I, Index r) {
  const Index n = W.rows();
  const Index K = Index(I.size());
  if (!is_valid_index_set(I, n) || r < 1 || r > K)
    throw std::invalid_argument("build_cur_spsd: bad index set or r");

  CurFactors cur;
  cur.rows = I;
  cur.cols = I;
  cur.rank = r;
  cur.C.resize(n, K);
  const IndexSet rows = all_indices(n);
  for (Index b = 0; b < K; ++b)
    cur.C.col(b) = W.fetch_col(I[std::size_t(b)], rows);

  DenseMatrix G(K, K);
  for (Index a = 0; a < K; ++a) G.row(a) = cur.C.row(I[std::size_t(a)]);
  // Cheap symmetry audit on the generator; a clearly asymmetric principal
  // block means the SPSD contract is broken.
  const double scale = G.cwiseAbs().maxCoeff();
  if ((G - G.transpose()).cwiseAbs().maxCoeff() >
      1e-8 * std::max(scale, 1.0))
    throw NotSpsdError("build_cur_spsd: generator is not symmetric");

  // Symmetry gives the row factor for free: W[I, :] = (W[:, I])^T.
  cur.R = cur.C.transpose();

  if (K == r) {
    const Svd dec = svd(G);
    if (dec.rho < K)
      throw SingularGeneratorError(
          "build_cur_spsd: K = r generator is singular; rerun with K > r "
          "for a pseudo-inverse nucleus");
    cur.U = dec.T * dec.sigma.cwiseInverse().asDiagonal() * dec.S.transpose();
  } else {
    cur.U = truncated_pseudo_inverse(G, r);
  }
  return cur;
}

}  // namespace curlra
