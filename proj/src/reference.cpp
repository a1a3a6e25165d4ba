#include "curlra/reference.hpp"

#include "curlra/detail/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace curlra {

namespace {

double n_choose_k(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  double acc = 1.0;
  for (Index i = 0; i < k; ++i) acc = acc * double(n - i) / double(i + 1);
  return acc;
}

IndexSet first_combination(Index k) {
  IndexSet c(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) c[std::size_t(i)] = i;
  return c;
}

bool next_combination(IndexSet& c, Index n) {
  const Index k = Index(c.size());
  for (Index i = k - 1; i >= 0; --i) {
    if (c[std::size_t(i)] < n - k + i) {
      ++c[std::size_t(i)];
      for (Index j = i + 1; j < k; ++j)
        c[std::size_t(j)] = c[std::size_t(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

// r-projective volume; |det| shortcut when the submatrix is square r x r,
// which is what exhaustive sweeps hit millions of times.
LogVolume submatrix_volume(const DenseMatrix& W, const IndexSet& rows,
                           const IndexSet& cols, Index r) {
  const DenseMatrix S = W(rows, cols);
  if (S.rows() == r && S.cols() == r) {
    const double det = S.determinant();
    if (det == 0.0) return LogVolume{};
    // Guard against subnormal determinants masquerading as volume.
    const double scale = S.cwiseAbs().maxCoeff();
    if (scale == 0.0 || std::abs(det) < std::pow(1e-14 * scale, double(r)))
      return projective_volume(S, r);
    return LogVolume{false, std::log(std::abs(det))};
  }
  return projective_volume(S, r);
}

bool volume_less(const LogVolume& a, const LogVolume& b) {
  if (a.is_zero) return !b.is_zero;
  if (b.is_zero) return false;
  return a.log_value < b.log_value;
}

BruteResult exhaustive_search(const DenseMatrix& W,
                              const std::vector<IndexSet>& row_sets,
                              const std::vector<IndexSet>& col_sets,
                              Index r) {
  BruteResult best;
  bool first = true;
  for (const IndexSet& rows : row_sets)
    for (const IndexSet& cols : col_sets) {
      const LogVolume v = submatrix_volume(W, rows, cols, r);
      // Strict improvement keeps the lexicographically first maximizer.
      if (first || volume_less(best.vol, v)) {
        best.rows = rows;
        best.cols = cols;
        best.vol = v;
        first = false;
      }
    }
  return best;
}

std::vector<IndexSet> all_combinations(Index n, Index k) {
  std::vector<IndexSet> out;
  IndexSet c = first_combination(k);
  do {
    out.push_back(c);
  } while (next_combination(c, n));
  return out;
}

void check_guard(double count) {
  if (count > 1e7)
    throw std::invalid_argument(
        "brute_force_max_volume: enumeration exceeds the 10^7 guard");
}

}  // namespace

BruteResult brute_force_max_volume(const DenseMatrix& W, Index k, Index l,
                                   Index r) {
  if (k < 1 || k > W.rows() || l < 1 || l > W.cols() || r < 1 ||
      r > std::min(k, l))
    throw std::invalid_argument("brute_force_max_volume: bad k, l, or r");
  check_guard(n_choose_k(W.rows(), k) * n_choose_k(W.cols(), l));
  return exhaustive_search(W, all_combinations(W.rows(), k),
                           all_combinations(W.cols(), l), r);
}

BruteResult brute_force_max_volume_rows_fixed(const DenseMatrix& W,
                                              const IndexSet& rows, Index l,
                                              Index r) {
  if (!is_valid_index_set(rows, W.rows()))
    throw std::invalid_argument("brute_force_max_volume: bad fixed rows");
  check_guard(n_choose_k(W.cols(), l));
  return exhaustive_search(W, {rows}, all_combinations(W.cols(), l), r);
}

BruteResult brute_force_max_volume_cols_fixed(const DenseMatrix& W, Index k,
                                              const IndexSet& cols,
                                              Index r) {
  if (!is_valid_index_set(cols, W.cols()))
    throw std::invalid_argument("brute_force_max_volume: bad fixed columns");
  check_guard(n_choose_k(W.rows(), k));
  return exhaustive_search(W, all_combinations(W.rows(), k), {cols}, r);
}

BruteResult brute_force_max_volume_principal(const DenseMatrix& W, Index k,
                                             Index r) {
  if (W.rows() != W.cols())
    throw std::invalid_argument(
        "brute_force_max_volume_principal: square input required");
  check_guard(n_choose_k(W.rows(), k));
  BruteResult best;
  bool first = true;
  IndexSet c = first_combination(k);
  do {
    const LogVolume v = submatrix_volume(W, c, c, r);
    if (first || volume_less(best.vol, v)) {
      best.rows = c;
      best.cols = c;
      best.vol = v;
      first = false;
    }
  } while (next_combination(c, W.rows()));
  return best;
}

OptimalError optimal_error(const DenseMatrix& W, Index r) {
  if (r < 0) throw std::invalid_argument("optimal_error: negative rank");
  const Svd dec = svd(W);
  OptimalError out;
  if (r >= dec.rho) return out;
  out.spectral = dec.sigma(r);
  double acc = 0.0;
  for (Index j = r; j < dec.rho; ++j) acc += dec.sigma(j) * dec.sigma(j);
  out.frobenius = std::sqrt(acc);
  return out;
}

AdversarialFamily::AdversarialFamily(Index m, Index n, Kind kind,
                                     std::uint64_t seed)
    : m_(m), n_(n), kind_(kind), seed_(seed) {
  if (m < 1 || n < 1)
    throw std::invalid_argument("AdversarialFamily: empty shape");
  base_ = DenseMatrix::Zero(m, n);
  perturb_ = DenseMatrix::Zero(m, n);
  if (kind == Kind::kDeltaPerturbed) {
    // Fixed small perturbation shared by every member; it cannot help any
    // algorithm distinguish members, so the argument goes through intact.
    detail::Rng rng(detail::mix_seed(seed, 0xadd));
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j)
        perturb_(i, j) = 1e-3 * (2.0 * rng.uniform() - 1.0);
  } else if (kind == Kind::kDeltaPlusLowRank) {
    base_ = random_rank_matrix(m, n, 1, detail::mix_seed(seed, 0xbace));
    base_ *= 0.25 / std::max(base_.cwiseAbs().maxCoeff(), 1e-300);
  }
}

EntryOracle AdversarialFamily::member(std::size_t idx) const {
  if (idx >= size())
    throw std::out_of_range("AdversarialFamily: member index out of range");
  DenseMatrix M = base_ + perturb_;
  if (idx > 0) {
    const Index flat = Index(idx - 1);
    M(flat / n_, flat % n_) += 1.0;
  }
  return dense_oracle(std::move(M));
}

AdversaryReport adversary_demo(Index m, Index n,
                               const ApproxProcedure& procedure,
                               std::size_t budget) {
  if (m < 1 || n < 1)
    throw std::invalid_argument("adversary_demo: empty shape");
  if (budget >= std::size_t(m) * std::size_t(n))
    throw std::invalid_argument("adversary_demo: budget must be below m*n");

  AdversaryReport rep;
  const EntryOracle null_run = null_oracle(m, n);
  const DenseMatrix out0 = procedure(null_run);
  rep.accesses = null_run.access_count();
  rep.within_budget = rep.accesses <= budget;
  rep.sublinear = rep.accesses < std::size_t(m) * std::size_t(n);

  std::ostringstream text;
  if (!rep.sublinear) {
    text << "procedure read all " << m * n
         << " entries; it is not sublinear and no indistinguishable pair "
            "exists for this input size";
    rep.summary = text.str();
    return rep;
  }

  for (Index i = 0; i < m && rep.witness_i < 0; ++i)
    for (Index j = 0; j < n; ++j)
      if (!null_run.was_accessed(i, j)) {
        rep.witness_i = i;
        rep.witness_j = j;
        break;
      }

  const EntryOracle delta_run =
      delta_oracle(m, n, rep.witness_i, rep.witness_j);
  const DenseMatrix out1 = procedure(delta_run);
  rep.outputs_identical = out0.rows() == out1.rows() &&
                          out0.cols() == out1.cols() &&
                          (out0.array() == out1.array()).all();

  rep.err_null = out0.size() ? out0.cwiseAbs().maxCoeff() : 0.0;
  DenseMatrix resid = -out1;
  resid(rep.witness_i, rep.witness_j) += 1.0;
  rep.err_delta = resid.cwiseAbs().maxCoeff();

  text << "procedure read " << rep.accesses << " of " << m * n
       << " entries on the null input, leaving cell (" << rep.witness_i
       << "," << rep.witness_j << ") unread; on the matching delta matrix "
       << (rep.outputs_identical ? "it returned the identical output"
                                 : "its output differed (contract breach)")
       << ", so the larger of the two errors is "
       << std::max(rep.err_null, rep.err_delta) << " >= 1/2";
  rep.summary = text.str();
  return rep;
}

// ---------------------------------------------------------------------------
// theorem_suite

namespace {

struct CheckState {
  double worst = std::numeric_limits<double>::infinity();
  std::uint64_t worst_seed = 0;

  void record(double margin, std::uint64_t seed) {
    if (margin < worst) {
      worst = margin;
      worst_seed = seed;
    }
  }
};

double safe_log(const LogVolume& v) { return v.is_zero ? -1e30 : v.log_value; }

DenseMatrix gaussian(Index m, Index n, detail::Rng& rng) {
  DenseMatrix M(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) M(i, j) = rng.normal();
  return M;
}

IndexSet random_subset(Index n, Index k, detail::Rng& rng) {
  std::vector<Index> pool(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) pool[std::size_t(i)] = i;
  for (Index i = 0; i < k; ++i) {
    const Index j = i + Index(rng.uniform_index(std::uint64_t(n - i)));
    std::swap(pool[std::size_t(i)], pool[std::size_t(j)]);
  }
  IndexSet out(pool.begin(), pool.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

DenseMatrix random_spsd(Index n, detail::Rng& rng, std::uint64_t seed) {
  const double ratio = 0.3 + 0.6 * rng.uniform();
  Vector spec(n);
  double v = 1.0;
  for (Index j = 0; j < n; ++j) {
    spec(j) = v;
    v *= ratio;
  }
  return random_spsd_matrix(spec, seed);
}

}  // namespace

TheoremSuiteResult theorem_suite(std::uint64_t seed, int trials) {
  if (trials < 1)
    throw std::invalid_argument("theorem_suite: need at least one trial");

  TheoremSuiteResult result;
  auto run = [&](const std::string& name, auto&& body) {
    CheckState st;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t s = detail::mix_seed(seed, std::uint64_t(t));
      detail::Rng rng(s);
      body(rng, s, st);
    }
    TheoremCheck check;
    check.name = name;
    check.seed = st.worst_seed;
    check.margin = st.worst;
    check.pass = st.worst >= 0.0;
    result.checks.push_back(check);
  };

  // Chebyshev, spectral, and Frobenius norms chain into each other with
  // dimension factors; every quality ratio in the suite leans on these.
  run("norm-chain", [&](detail::Rng& rng, std::uint64_t s, CheckState& st) {
    const Index m = 1 + Index(rng.uniform_index(12));
    const Index n = 1 + Index(rng.uniform_index(12));
    const DenseMatrix M = gaussian(m, n, rng);
    const Norms nm = norms(M);
    const double tol = 1e-9 * (nm.frobenius + 1.0);
    const double root_mn = std::sqrt(double(m) * double(n));
    const double root_min = std::sqrt(double(std::min(m, n)));
    st.record(nm.spectral + tol - nm.chebyshev, s);
    st.record(nm.frobenius + tol - nm.spectral, s);
    st.record(root_min * nm.spectral + tol - nm.frobenius, s);
    st.record(root_mn * nm.chebyshev + tol - nm.spectral, s);
    st.record(root_mn * nm.chebyshev + tol - nm.frobenius, s);
  });

  // Volume is bounded by the product of column norms.
  run("hadamard-volume", [&](detail::Rng& rng, std::uint64_t s,
                             CheckState& st) {
    const Index k = 1 + Index(rng.uniform_index(8));
    const Index l = 1 + Index(rng.uniform_index(k));
    const DenseMatrix M = gaussian(k, l, rng);
    const LogVolume v = volume(M);
    if (v.is_zero) {
      st.record(1.0, s);
      return;
    }
    double bound = 0.0;
    for (Index j = 0; j < l; ++j) bound += std::log(M.col(j).norm());
    st.record(bound + 1e-9 - v.log_value, s);
  });

  // A perturbation of spectral norm e moves each singular value by at most
  // e, so the r-projective volume moves by factors (1 +- e/sigma_r)^r.
  run("perturbation-volume-stability",
      [&](detail::Rng& rng, std::uint64_t s, CheckState& st) {
        const Index q = 2 + Index(rng.uniform_index(6));
        const Index r = 1 + Index(rng.uniform_index(q));
        const DenseMatrix W = gaussian(q, q, rng);
        const Svd dec = svd(W);
        if (dec.rho < r) {
          st.record(1.0, s);
          return;
        }
        const double sr = dec.sigma(r - 1);
        DenseMatrix E = gaussian(q, q, rng);
        E *= (0.4 * rng.uniform() * sr) / norms(E).spectral;
        const double e = norms(E).spectral;
        const LogVolume before = projective_volume(W, r);
        const LogVolume after = projective_volume(W + E, r);
        if (before.is_zero || after.is_zero) {
          st.record(-1.0, s);  // full-rank instances should never get here
          return;
        }
        const double ratio = after.log_value - before.log_value;
        const double up = double(r) * std::log1p(e / sr) + 1e-9;
        const double down = double(r) * std::log1p(-e / sr) - 1e-9;
        st.record(up - ratio, s);
        st.record(ratio - down, s);
      });

  // With inner dimension q = min(m, n) the volume of a product splits
  // exactly into the product of volumes.
  run("product-volume-identity",
      [&](detail::Rng& rng, std::uint64_t s, CheckState& st) {
        const Index mdim = 1 + Index(rng.uniform_index(6));
        const Index ndim = 1 + Index(rng.uniform_index(6));
        const Index q = std::min(mdim, ndim);
        const DenseMatrix G = gaussian(mdim, q, rng);
        const DenseMatrix H = gaussian(q, ndim, rng);
        const LogVolume vg = volume(G), vh = volume(H), vgh = volume(G * H);
        if (vg.is_zero || vh.is_zero || vgh.is_zero) {
          st.record(1.0, s);
          return;
        }
        const double lhs = vgh.log_value;
        const double rhs = vg.log_value + vh.log_value;
        const double tol = 1e-7 * (1.0 + std::abs(rhs));
        st.record(tol - std::abs(lhs - rhs), s);
      });

  // For any inner dimension the r-projective volume of a product is at
  // most the product of r-projective volumes.
  run("product-volume-bound",
      [&](detail::Rng& rng, std::uint64_t s, CheckState& st) {
        const Index mdim = 1 + Index(rng.uniform_index(6));
        const Index ndim = 1 + Index(rng.uniform_index(6));
        const Index q = 1 + Index(rng.uniform_index(6));
        const Index r =
            1 + Index(rng.uniform_index(std::min({mdim, ndim, q})));
        const DenseMatrix G = gaussian(mdim, q, rng);
        const DenseMatrix H = gaussian(q, ndim, rng);
        const LogVolume vgh = projective_volume(G * H, r);
        if (vgh.is_zero) {
          st.record(1.0, s);
          return;
        }
        const double rhs = safe_log(projective_volume(G, r)) +
                           safe_log(projective_volume(H, r));
        st.record(rhs + 1e-7 * (1.0 + std::abs(rhs)) - vgh.log_value, s);
      });

  // Square factors through a wider inner dimension still obey the
  // one-sided volume bound.
  run("product-volume-square-bound",
      [&](detail::Rng& rng, std::uint64_t s, CheckState& st) {
        const Index n = 1 + Index(rng.uniform_index(5));
        const Index q = n + Index(rng.uniform_index(4));
        const DenseMatrix G = gaussian(n, q, rng);
        const DenseMatrix H = gaussian(q, n, rng);
        const LogVolume vgh = volume(G * H);
        if (vgh.is_zero) {
          st.record(1.0, s);
          return;
        }
        const double rhs = safe_log(volume(G)) + safe_log(volume(H));
        st.record(rhs + 1e-7 * (1.0 + std::abs(rhs)) - vgh.log_value, s);
      });

  // (G Sigma H)^+ = H^+ Sigma^-1 G^+ whenever G has full column rank and H
  // full row rank.
  run("factored-pseudo-inverse",
      [&](detail::Rng& rng, std::uint64_t s, CheckState& st) {
        const Index r = 1 + Index(rng.uniform_index(4));
        const Index m = r + Index(rng.uniform_index(5));
        const Index n = r + Index(rng.uniform_index(5));
        const DenseMatrix G = gaussian(m, r, rng);
        const DenseMatrix H = gaussian(r, n, rng);
        Vector d(r);
        for (Index j = 0; j < r; ++j) d(j) = 0.25 + 2.0 * rng.uniform();
        const DenseMatrix S = d.asDiagonal();
        const DenseMatrix lhs = pseudo_inverse(G * S * H);
        const DenseMatrix rhs = pseudo_inverse(H) *
                                d.cwiseInverse().asDiagonal() *
                                pseudo_inverse(G);
        const double scale = rhs.cwiseAbs().maxCoeff();
        const double diff = (lhs - rhs).cwiseAbs().maxCoeff();
        st.record(1e-8 * (1.0 + scale) - diff, s);
      });

  // SPSD cross blocks: vol(W[I,J])^2 <= vol(W[I,I]) * vol(W[J,J]) for
  // equal-cardinality index sets.
  run("spsd-cross-volume-bound",
      [&](detail::Rng& rng, std::uint64_t s, CheckState& st) {
        const Index n = 4 + Index(rng.uniform_index(6));
        const Index k = 1 + Index(rng.uniform_index(std::min<Index>(n, 5)));
        const DenseMatrix W = random_spsd(n, rng, detail::mix_seed(s, 1));
        const IndexSet I = random_subset(n, k, rng);
        const IndexSet J = random_subset(n, k, rng);
        const LogVolume vij = volume(W(I, J));
        if (vij.is_zero) {
          st.record(1.0, s);
          return;
        }
        const double rhs = safe_log(volume(W(I, I))) +
                           safe_log(volume(W(J, J)));
        st.record(rhs + 1e-7 * (1.0 + std::abs(rhs)) - 2.0 * vij.log_value,
                  s);
      });

  // SPSD off-diagonal blocks never carry more projective volume than the
  // larger of the two principal blocks.
  run("offdiag-volume-max",
      [&](detail::Rng& rng, std::uint64_t s, CheckState& st) {
        const Index n = 4 + Index(rng.uniform_index(6));
        const Index k = 1 + Index(rng.uniform_index(std::min<Index>(n, 4)));
        const Index r = 1 + Index(rng.uniform_index(k));
        const DenseMatrix W = random_spsd(n, rng, detail::mix_seed(s, 2));
        const IndexSet I = random_subset(n, k, rng);
        const IndexSet J = random_subset(n, k, rng);
        const LogVolume vij = projective_volume(W(I, J), r);
        if (vij.is_zero) {
          st.record(1.0, s);
          return;
        }
        const double rhs = std::max(safe_log(projective_volume(W(I, I), r)),
                                    safe_log(projective_volume(W(J, J), r)));
        st.record(rhs + 1e-7 * (1.0 + std::abs(rhs)) - vij.log_value, s);
      });

  // The volume of a full-rank matrix and of its pseudo-inverse multiply to
  // one, as do the r-projective volumes of a truncation and its inverse.
  run("volume-inverse-identity",
      [&](detail::Rng& rng, std::uint64_t s, CheckState& st) {
        const Index n = 1 + Index(rng.uniform_index(7));
        const DenseMatrix W = gaussian(n, n, rng);
        const LogVolume v = volume(W);
        if (v.is_zero) {
          st.record(1.0, s);
          return;
        }
        const LogVolume vp = volume(pseudo_inverse(W));
        const double tol = 1e-8 * double(n) + 1e-9;
        st.record(tol - std::abs(v.log_value + vp.log_value), s);

        const Index r = 1 + Index(rng.uniform_index(n));
        const LogVolume vr = projective_volume(W, r);
        const LogVolume vrp =
            projective_volume(truncated_pseudo_inverse(W, r), r);
        if (vr.is_zero || vrp.is_zero) {
          st.record(-1.0, s);
          return;
        }
        st.record(tol - std::abs(vr.log_value + vrp.log_value), s);
      });

  // Multiplying by an orthonormal factor changes no singular value, hence
  // no volume, of any column subset.
  run("orthogonal-invariance",
      [&](detail::Rng& rng, std::uint64_t s, CheckState& st) {
        const Index m = 2 + Index(rng.uniform_index(6));
        const Index n = 1 + Index(rng.uniform_index(6));
        const Index r = 1 + Index(rng.uniform_index(std::min(m, n)));
        const DenseMatrix M = gaussian(m, n, rng);
        const DenseMatrix Q =
            random_orthonormal(m, m, detail::mix_seed(s, 3));
        const Index l = 1 + Index(rng.uniform_index(n));
        const IndexSet J = random_subset(n, l, rng);
        const Index rr = std::min(r, Index(J.size()));
        const LogVolume a = projective_volume(M(Eigen::all, J), rr);
        const LogVolume b = projective_volume((Q * M)(Eigen::all, J), rr);
        if (a.is_zero || b.is_zero) {
          st.record((a.is_zero == b.is_zero) ? 1.0 : -1.0, s);
          return;
        }
        st.record(1e-8 * (1.0 + std::abs(a.log_value)) -
                      std::abs(a.log_value - b.log_value),
                  s);
      });

  // Fixed regression: orthonormal row times orthonormal column with a zero
  // product; volumes of the factors are 1, the product's is 0.
  run("orthogonal-null-product",
      [&](detail::Rng&, std::uint64_t s, CheckState& st) {
        DenseMatrix G(1, 2), H(2, 1);
        G << 1.0, 0.0;
        H << 0.0, 1.0;
        const LogVolume vg = volume(G), vh = volume(H), vgh = volume(G * H);
        st.record((!vg.is_zero && std::abs(vg.log_value) < 1e-12) ? 1.0
                                                                  : -1.0,
                  s);
        st.record((!vh.is_zero && std::abs(vh.log_value) < 1e-12) ? 1.0
                                                                  : -1.0,
                  s);
        st.record(vgh.is_zero ? 1.0 : -1.0, s);
      });

  // Fixed regression: padding with a zero column keeps the product volume
  // at 1 while one factor's volume is 0, so the product identity genuinely
  // needs its inner-dimension condition.
  run("padded-identity-product",
      [&](detail::Rng&, std::uint64_t s, CheckState& st) {
        DenseMatrix G(1, 2);
        G << 1.0, 0.0;
        DenseMatrix H = DenseMatrix::Zero(2, 2);
        H(0, 0) = 1.0;
        const LogVolume vg = volume(G), vh = volume(H), vgh = volume(G * H);
        st.record((!vg.is_zero && std::abs(vg.log_value) < 1e-12) ? 1.0
                                                                  : -1.0,
                  s);
        st.record(vh.is_zero ? 1.0 : -1.0, s);
        st.record((!vgh.is_zero && std::abs(vgh.log_value) < 1e-12) ? 1.0
                                                                    : -1.0,
                  s);
      });

  std::ostringstream ledger;
  char line[160];
  for (const TheoremCheck& c : result.checks) {
    if (c.pass)
      ++result.passed;
    else
      ++result.failed;
    std::snprintf(line, sizeof(line), "%-32s seed=%llu margin=%+.3e %s\n",
                  c.name.c_str(), (unsigned long long)c.seed, c.margin,
                  c.pass ? "PASS" : "FAIL");
    ledger << line;
  }
  result.ledger = ledger.str();
  return result;
}

}  // namespace curlra
