#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "curlra/maxvol.hpp"
#include "curlra/oracle.hpp"
#include "curlra/reference.hpp"

#include <algorithm>

using namespace curlra;

namespace {

// No single-column swap may improve the selection by more than 1 + delta;
// that is the contract the swap loop terminates on.
bool locally_maximal(const DenseMatrix& strip, const IndexSet& sel, Index r,
                     double delta) {
  const Index q = strip.cols();
  const LogVolume base = projective_volume(strip(Eigen::all, sel), r);
  for (std::size_t a = 0; a < sel.size(); ++a)
    for (Index j = 0; j < q; ++j) {
      if (std::find(sel.begin(), sel.end(), j) != sel.end()) continue;
      IndexSet alt = sel;
      alt[a] = j;
      std::sort(alt.begin(), alt.end());
      const LogVolume v = projective_volume(strip(Eigen::all, alt), r);
      if (volume_improves(v, base, delta)) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("column selection returns an ascending set of the right size") {
  const DenseMatrix strip = random_rank_matrix(3, 12, 3, 2);
  const IndexSet sel = maxvol_submatrix(strip, 3, 5, 3);
  REQUIRE(sel.size() == 5);
  CHECK(is_valid_index_set(sel, 12));
}

TEST_CASE("selection is locally maximal under single swaps") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const DenseMatrix strip = random_rank_matrix(3, 10, 3, seed);
    const IndexSet sel = maxvol_submatrix(strip, 3, 3, 3);
    CHECK(locally_maximal(strip, sel, 3, 1e-3));
  }
}

TEST_CASE("selection lands near the global optimum on small strips") {
  // local maximality bounds the gap to the exhaustive winner by the number
  // of swaps times the tolerance; on these sizes it is usually exact
  const DenseMatrix strip = random_rank_matrix(3, 9, 3, 77);
  const IndexSet sel = maxvol_submatrix(strip, 3, 3, 3);
  const BruteResult best = brute_force_max_volume(strip, 3, 3, 3);
  const LogVolume got = projective_volume(strip(Eigen::all, sel), 3);
  REQUIRE_FALSE(got.is_zero);
  REQUIRE_FALSE(best.vol.is_zero);
  // factor (1 + delta)^swaps with generous headroom
  CHECK(got.log_value >= best.vol.log_value - 3.0);
}

TEST_CASE("warm start at least matches the cold result") {
  const DenseMatrix strip = random_rank_matrix(3, 10, 3, 8);
  const IndexSet cold = maxvol_submatrix(strip, 3, 3, 3);
  const IndexSet warm = maxvol_submatrix(strip, 3, 3, 3, cold);
  const LogVolume vc = projective_volume(strip(Eigen::all, cold), 3);
  const LogVolume vw = projective_volume(strip(Eigen::all, warm), 3);
  REQUIRE_FALSE(vw.is_zero);
  CHECK(vw.log_value >= vc.log_value - 1e-12);
}

TEST_CASE("a square strip selects every index") {
  const DenseMatrix strip = random_rank_matrix(3, 3, 3, 4);
  const IndexSet sel = maxvol_submatrix(strip, 3, 3, 3);
  CHECK(sel == IndexSet{0, 1, 2});
}

TEST_CASE("tall strips select rows through the transposed problem") {
  const DenseMatrix strip = random_rank_matrix(12, 3, 3, 6);
  const IndexSet sel = maxvol_submatrix(strip, 4, 3, 3);
  REQUIRE(sel.size() == 4);
  CHECK(is_valid_index_set(sel, 12));
  // selected rows give a full-rank 4 x 3 block
  CHECK_FALSE(projective_volume(strip(sel, Eigen::all), 3).is_zero);
}

TEST_CASE("shape mismatches are rejected") {
  const DenseMatrix strip = random_rank_matrix(3, 10, 3, 9);
  CHECK_THROWS_AS(maxvol_submatrix(strip, 4, 5, 3), std::invalid_argument);
  CHECK_THROWS_AS(maxvol_submatrix(strip, 3, 11, 3), std::invalid_argument);
  CHECK_THROWS_AS(maxvol_submatrix(strip, 3, 5, 4), std::invalid_argument);
}

TEST_CASE("projective selection matches direct selection on a factor") {
  // W has rank exactly 3; selecting on W reduces to selecting on its
  // triangular factor, which must produce a nondegenerate generator
  const DenseMatrix W = random_rank_matrix(8, 14, 3, 10);
  const IndexSet cols = projective_to_volume(W, 3, 3, Orientation::kCols);
  REQUIRE(cols.size() == 3);
  CHECK(is_valid_index_set(cols, 14));
  CHECK_FALSE(projective_volume(W(Eigen::all, cols), 3).is_zero);

  const IndexSet rows = projective_to_volume(W, 3, 3, Orientation::kRows);
  REQUIRE(rows.size() == 3);
  CHECK(is_valid_index_set(rows, 8));
  CHECK_FALSE(projective_volume(W(rows, Eigen::all), 3).is_zero);
}

TEST_CASE("projective selection requires rank exactly r") {
  const DenseMatrix W = random_rank_matrix(8, 14, 4, 10);
  CHECK_THROWS_AS(projective_to_volume(W, 3, 3, Orientation::kCols),
                  std::invalid_argument);
}
