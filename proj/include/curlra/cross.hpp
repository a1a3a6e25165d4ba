#pragma once

#include "curlra/cur.hpp"

#include <cstdint>

namespace curlra {

// Strip construction failed repeatedly on degenerate (rank-deficient)
// column draws; the input is a poor fit for cross-approximation.
struct DegenerateStripError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CaConfig {
  Index r = 1;    // target rank
  Index k = 0;    // rows kept per vertical step; 0 means k = r
  Index l = 0;    // columns kept per horizontal step; 0 means l = r
  Index p = 0;    // vertical strip row budget, k <= p <= m; 0 means all m
  Index q = 0;    // horizontal strip column budget; 0 means all n
  int max_loops = 8;        // full vertical+horizontal rounds before FAILURE
  double tau = 0.0;         // stop once the sampled Chebyshev error <= tau
  int verify_samples = 200; // entries sampled per verification
  std::uint64_t seed = 0;
};

enum class CaStatus { kConverged, kBudgetExhausted };

struct CaOutcome {
  CaStatus status = CaStatus::kBudgetExhausted;
  CurFactors cur;
  int loops_executed = 0;
  double estimated_error = 0.0;  // sampled Chebyshev estimate of the result
  std::size_t access_count = 0;
};

// Alternating cross-approximation: seeded random columns start the process,
// then each loop re-selects rows against the current column strip and
// columns against the current row strip, maximizing r-projective volume
// within the strip.  The canonical CUR is rebuilt and verified after every
// half-step; the first verification at or below tau returns kConverged.
// Degenerate strips restart with fresh columns up to 3 times, then throw.
CaOutcome ca_iterations(const EntryOracle& W, const CaConfig& cfg);

}  // namespace curlra
