#pragma once

#include "curlra/oracle.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace curlra {

// One low-rank off-diagonal block B ~= F * H, where H holds actual rows
// B[I, :] of the block and F carries the interpolation coefficients.
struct HssBlock {
  Index row0 = 0, col0 = 0;  // absolute offset of the block
  Index h = 0, w = 0;        // block shape
  Index rank = 0;            // rows of H / cols of F
  DenseMatrix F;             // h x rank
  DenseMatrix H;             // rank x w
  IndexSet rows, cols;       // selected pivots, block-local, ascending
  bool rank_capped = false;  // rank cap hit before the tolerance
};

struct HssLeaf {
  Index i0 = 0, size = 0;
  DenseMatrix D;  // dense diagonal block
};

struct HssTree {
  Index n = 0;
  Index leaf_size = 0;
  double xi = 0.0;
  Index max_rank = 0;
  std::vector<HssLeaf> leaves;
  std::vector<HssBlock> blocks;
  std::size_t build_accesses = 0;

  Index hss_rank() const;  // max block rank
  bool rank_warning() const;
  DenseMatrix densify() const;  // test-scale reconstruction
};

// Builds the two-sided HSS tiling of an n x n matrix through its entry
// oracle: perfect binary partition down to leaf_size, dense leaves, and a
// cross-approximation per off-diagonal block with relative spectral
// tolerance xi.  The per-block rank drops the longest tail of recorded
// residual updates that sit inside the tolerance, and ca_loops extra
// refinement passes re-pivot each block within the entries already
// fetched (no new reads).
HssTree build_hss(const EntryOracle& W, Index leaf_size, double xi,
                  Index max_rank, int ca_loops, std::uint64_t seed);

// y = T x through the factored form.  flops, when given, receives the
// multiply-add count: 2 * size^2 per leaf and 2 * rank * (h + w) per block.
Vector hss_matvec(const HssTree& tree, const Vector& x,
                  std::size_t* flops = nullptr);

struct HssBenchRow {
  std::string input;
  int loops = 0;
  Index hss_rank = 0;
  double spec_mean = 0.0, spec_std = 0.0;
  double cheb_mean = 0.0, cheb_std = 0.0;
  double accesses = 0.0;  // mean distinct entries per trial
  int trials = 0;
};

// Nodes x_i = i + 1 and y_j = j + 1.5, each perturbed by a seeded uniform
// draw from [-0.2, 0.2]; the base gap of 0.5 keeps every pair separated by
// at least 0.1, so the kernel stays well defined.
void perturbed_cauchy_nodes(Index n, std::uint64_t seed,
                            std::vector<double>& x, std::vector<double>& y);

// Benchmarks build_hss on Cauchy inputs with per-trial node perturbations,
// measuring relative spectral and Chebyshev errors against dense assembly.
// One row per (size, rank cap, loop count) configuration; the same seeds
// produce the same node draws across loop counts, so rows are paired.
// Refuses n > 4096, where dense assembly stops being sensible.
std::vector<HssBenchRow> hss_benchmark(const std::vector<Index>& sizes,
                                       const std::vector<Index>& ranks,
                                       const std::vector<int>& loops_list,
                                       int trials, std::uint64_t seed,
                                       Index leaf_size = 32, double xi = 1e-8);

std::string hss_bench_csv(const std::vector<HssBenchRow>& rows);

}  // namespace curlra
