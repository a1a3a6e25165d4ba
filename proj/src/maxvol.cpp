#include "curlra/maxvol.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace curlra {

namespace {

// Column-selection core: pick l columns of the k x q matrix M whose k x l
// submatrix has locally (1 + delta)-maximal r-projective volume.
IndexSet select_columns(const DenseMatrix& M, Index l, Index r,
                        const std::optional<IndexSet>& warm, double delta) {
  const Index q = M.cols();

  Eigen::ColPivHouseholderQR<DenseMatrix> qr(M);
  const auto perm = qr.colsPermutation().indices();
  IndexSet sel(static_cast<std::size_t>(l));
  for (Index a = 0; a < l; ++a) sel[std::size_t(a)] = Index(perm(a));
  std::sort(sel.begin(), sel.end());

  auto vol_of = [&](const IndexSet& s) {
    return projective_volume(M(Eigen::all, s), r);
  };
  LogVolume cur = vol_of(sel);

  if (warm) {
    if (!is_valid_index_set(*warm, q) || Index(warm->size()) != l)
      throw std::invalid_argument("maxvol_submatrix: bad warm-start set");
    const LogVolume wv = vol_of(*warm);
    // Ties go to the warm start: repeated calls on an unchanged strip then
    // return their input unchanged.
    if (!wv.is_zero && (cur.is_zero || wv.log_value >= cur.log_value)) {
      sel = *warm;
      cur = wv;
    }
  }

  const double gate = std::log1p(delta);
  std::vector<char> in_set(std::size_t(q), 0);
  for (Index c : sel) in_set[std::size_t(c)] = 1;

  // Best-improvement sweeps.  Each accepted swap grows the volume by more
  // than 1 + delta, so the count is bounded; the cap is a float safety net.
  for (int sweep = 0; sweep < 1000; ++sweep) {
    double best_gain = gate;
    Index best_pos = -1, best_cand = -1;
    LogVolume best_vol;
    IndexSet trial = sel;
    for (std::size_t a = 0; a < sel.size(); ++a) {
      for (Index c = 0; c < q; ++c) {
        if (in_set[std::size_t(c)]) continue;
        trial = sel;
        trial[a] = c;
        const LogVolume v = vol_of(trial);
        if (v.is_zero) continue;
        const double gain =
            cur.is_zero ? std::numeric_limits<double>::infinity()
                        : v.log_value - cur.log_value;
        if (gain > best_gain) {
          best_gain = gain;
          best_pos = Index(a);
          best_cand = c;
          best_vol = v;
        }
      }
    }
    if (best_pos < 0) break;
    in_set[std::size_t(sel[std::size_t(best_pos)])] = 0;
    in_set[std::size_t(best_cand)] = 1;
    sel[std::size_t(best_pos)] = best_cand;
    std::sort(sel.begin(), sel.end());
    cur = best_vol;
  }
  return sel;
}

}  // namespace

IndexSet maxvol_submatrix(const DenseMatrix& strip, Index k, Index l, Index r,
                          const std::optional<IndexSet>& warm, double delta) {
  if (r < 1 || r > std::min(k, l))
    throw std::invalid_argument("maxvol_submatrix: need 1 <= r <= min(k, l)");
  if (strip.rows() == k && strip.cols() >= l) {
    if (strip.cols() == l) {
      IndexSet all(static_cast<std::size_t>(l));
      for (Index c = 0; c < l; ++c) all[std::size_t(c)] = c;
      return all;
    }
    return select_columns(strip, l, r, warm, delta);
  }
  if (strip.cols() == l && strip.rows() >= k) {
    DenseMatrix t = strip.transpose();
    return select_columns(t, k, r, warm, delta);
  }
  throw std::invalid_argument(
      "maxvol_submatrix: strip shape matches neither k rows nor l columns");
}

IndexSet projective_to_volume(const DenseMatrix& W, Index r, Index l,
                              Orientation select) {
  if (select == Orientation::kRows) {
    DenseMatrix t = W.transpose();
    return projective_to_volume(t, r, l, Orientation::kCols);
  }
  if (svd(W).rho != r)
    throw std::invalid_argument(
        "projective_to_volume: numerical rank differs from r");
  if (l < r || l > W.cols())
    throw std::invalid_argument("projective_to_volume: need r <= l <= n");

  // A thin orthonormal factor on the left leaves every column-subset
  // singular value unchanged, so selection happens on the small triangular
  // factor instead of W.  Its columns arrive permuted; map back afterwards.
  Eigen::ColPivHouseholderQR<DenseMatrix> qr(W);
  DenseMatrix R = qr.matrixQR()
                      .topRows(std::min(W.rows(), W.cols()))
                      .triangularView<Eigen::Upper>();
  DenseMatrix Rr = R.topRows(r);
  const IndexSet local = maxvol_submatrix(Rr, r, l, r);
  const auto perm = qr.colsPermutation().indices();
  IndexSet out(local.size());
  for (std::size_t a = 0; a < local.size(); ++a)
    out[a] = Index(perm(local[a]));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace curlra
