#include "curlra/cross.hpp"

#include "curlra/detail/rng.hpp"
#include "curlra/maxvol.hpp"
#include "curlra/volume.hpp"

#include <algorithm>
#include <cmath>

namespace curlra {

namespace {

IndexSet all_indices(Index n) {
  IndexSet s(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) s[std::size_t(i)] = i;
  return s;
}

// The current pivots plus the lowest other indices, padded to `budget`.
IndexSet padded_strip(const IndexSet& pivots, Index budget, Index bound) {
  if (Index(pivots.size()) >= budget) return pivots;
  std::vector<char> taken(std::size_t(bound), 0);
  for (Index v : pivots) taken[std::size_t(v)] = 1;
  IndexSet out = pivots;
  for (Index i = 0; i < bound && Index(out.size()) < budget; ++i)
    if (!taken[std::size_t(i)]) out.push_back(i);
  std::sort(out.begin(), out.end());
  return out;
}

// Positions of `sub` inside the ascending superset `sup`.
std::optional<IndexSet> positions_in(const IndexSet& sub,
                                     const IndexSet& sup) {
  IndexSet pos;
  std::size_t a = 0;
  for (std::size_t b = 0; b < sup.size() && a < sub.size(); ++b)
    if (sup[b] == sub[a]) {
      pos.push_back(Index(b));
      ++a;
    }
  if (a != sub.size()) return std::nullopt;
  return pos;
}

IndexSet map_positions(const IndexSet& pos, const IndexSet& sup) {
  IndexSet out(pos.size());
  for (std::size_t a = 0; a < pos.size(); ++a)
    out[a] = sup[std::size_t(pos[a])];
  return out;
}

struct Degenerate {};  // internal signal: restart with fresh columns

}  // namespace

CaOutcome ca_iterations(const EntryOracle& W, const CaConfig& cfg) {
  const Index m = W.rows(), n = W.cols();
  const Index r = cfg.r;
  const Index k = cfg.k > 0 ? cfg.k : r;
  const Index l = cfg.l > 0 ? cfg.l : r;
  const Index p = cfg.p > 0 ? cfg.p : m;
  const Index q = cfg.q > 0 ? cfg.q : n;
  if (r < 1 || r > std::min(k, l))
    throw std::invalid_argument("ca_iterations: need 1 <= r <= min(k, l)");
  if (k > p || p > m || l > q || q > n)
    throw std::invalid_argument(
        "ca_iterations: need k <= p <= m and l <= q <= n");
  if (cfg.tau < 0.0 || cfg.max_loops < 1 || cfg.verify_samples < 1)
    throw std::invalid_argument("ca_iterations: bad loop/tau/sample config");

  const std::size_t before = W.access_count();
  detail::Rng draw(detail::mix_seed(cfg.seed, 0xca11));
  const IndexSet rows_all = all_indices(m);
  const IndexSet cols_all = all_indices(n);

  auto build = [&](const IndexSet& I, const IndexSet& J) {
    CurFactors cur;
    cur.rows = I;
    cur.cols = J;
    cur.rank = r;
    cur.C.resize(m, Index(J.size()));
    for (std::size_t b = 0; b < J.size(); ++b)
      cur.C.col(Index(b)) = W.fetch_col(J[b], rows_all);
    cur.R.resize(Index(I.size()), n);
    for (std::size_t a = 0; a < I.size(); ++a)
      cur.R.row(Index(a)) = W.fetch_row(I[a], cols_all);
    DenseMatrix G(Index(I.size()), Index(J.size()));
    for (std::size_t a = 0; a < I.size(); ++a)
      G.row(Index(a)) = cur.C(I[a], Eigen::all);
    cur.U = truncated_pseudo_inverse(G, r);
    return cur;
  };

  // One run from a fresh column draw; throws Degenerate on a strip whose
  // projective volume vanishes at every candidate.
  auto attempt = [&]() -> CaOutcome {
    IndexSet J;
    {
      std::vector<char> taken(std::size_t(n), 0);
      while (Index(J.size()) < l) {
        const Index c = Index(draw.uniform_index(std::uint64_t(n)));
        if (!taken[std::size_t(c)]) {
          taken[std::size_t(c)] = 1;
          J.push_back(c);
        }
      }
      std::sort(J.begin(), J.end());
    }
    IndexSet I;

    CaOutcome out;
    bool have_best = false;
    int verify_step = 0;

    auto verify = [&](const CurFactors& cur) {
      const ErrorEstimate est = verify_error(
          W, cur, cfg.verify_samples,
          detail::mix_seed(cfg.seed, 0x7e00 + std::uint64_t(verify_step++)));
      if (!have_best || est.chebyshev < out.estimated_error) {
        out.cur = cur;
        out.estimated_error = est.chebyshev;
        have_best = true;
      }
      return est.chebyshev <= cfg.tau;
    };

    for (int loop = 1; loop <= cfg.max_loops; ++loop) {
      out.loops_executed = loop;

      // Vertical: re-select rows against the current column strip.
      const IndexSet P = padded_strip(I, p, m);
      const DenseMatrix cstrip = W.fetch_block(P, J);
      if (projective_volume(cstrip, r).is_zero) throw Degenerate{};
      if (Index(P.size()) == k) {
        I = P;  // the strip budget leaves nothing to choose
      } else {
        const auto warm_rows =
            Index(I.size()) == k ? positions_in(I, P) : std::nullopt;
        I = map_positions(maxvol_submatrix(cstrip, k, l, r, warm_rows), P);
      }
      if (verify(build(I, J))) {
        out.status = CaStatus::kConverged;
        break;
      }

      // Horizontal: re-select columns against the current row strip.
      const IndexSet Q = padded_strip(J, q, n);
      const DenseMatrix rstrip = W.fetch_block(I, Q);
      if (projective_volume(rstrip, r).is_zero) throw Degenerate{};
      if (Index(Q.size()) == l) {
        J = Q;
      } else {
        const auto warm_cols =
            Index(J.size()) == l ? positions_in(J, Q) : std::nullopt;
        J = map_positions(maxvol_submatrix(rstrip, k, l, r, warm_cols), Q);
      }
      if (verify(build(I, J))) {
        out.status = CaStatus::kConverged;
        break;
      }
    }
    return out;
  };

  for (int tries = 0; tries < 4; ++tries) {
    try {
      CaOutcome out = attempt();
      out.access_count = W.access_count() - before;
      return out;
    } catch (const Degenerate&) {
      // fresh columns on the next attempt
    }
  }
  throw DegenerateStripError(
      "ca_iterations: strip stayed rank-deficient after 3 column re-draws");
}

}  // namespace curlra
