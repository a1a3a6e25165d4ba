#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "curlra/oracle.hpp"
#include "curlra/volume.hpp"

#include <cmath>

using namespace curlra;

TEST_CASE("volume of a square matrix is |det|") {
  DenseMatrix M(2, 2);
  M << 3, 1,
       2, 4;  // det = 10
  const LogVolume v = volume(M);
  REQUIRE_FALSE(v.is_zero);
  CHECK(v.log_value == doctest::Approx(std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("volume of a rank-deficient matrix is flagged zero") {
  DenseMatrix M(2, 2);
  M << 1, 2,
       2, 4;
  CHECK(volume(M).is_zero);
  CHECK(volume(DenseMatrix::Zero(3, 2)).is_zero);
}

TEST_CASE("rectangular volume is the product of all min-dim singular values") {
  DenseMatrix M = DenseMatrix::Zero(4, 2);
  M(0, 0) = 2.0;
  M(1, 1) = 3.0;
  const LogVolume v = volume(M);
  REQUIRE_FALSE(v.is_zero);
  CHECK(v.log_value == doctest::Approx(std::log(6.0)));
}

TEST_CASE("projective volume keeps only the leading r factors") {
  DenseMatrix D = DenseMatrix::Zero(3, 3);
  D.diagonal() << 4, 2, 1;
  CHECK(projective_volume(D, 1).log_value == doctest::Approx(std::log(4.0)));
  CHECK(projective_volume(D, 2).log_value == doctest::Approx(std::log(8.0)));
  CHECK(projective_volume(D, 3).log_value == doctest::Approx(std::log(8.0)));

  // a rank-2 matrix has nonzero 2-projective volume but zero 3-volume
  DenseMatrix R = DenseMatrix::Zero(3, 3);
  R.diagonal() << 4, 2, 0;
  CHECK_FALSE(projective_volume(R, 2).is_zero);
  CHECK(projective_volume(R, 3).is_zero);
}

TEST_CASE("projective volume with r = 0 is the empty product") {
  const LogVolume v = projective_volume(DenseMatrix::Zero(2, 2), 0);
  CHECK_FALSE(v.is_zero);
  CHECK(v.log_value == 0.0);
}

TEST_CASE("projective volume rejects r beyond the shape") {
  CHECK_THROWS_AS(projective_volume(DenseMatrix::Zero(2, 3), 3),
                  std::invalid_argument);
}

TEST_CASE("volume survives scales that overflow a plain product") {
  // 40 singular values of 1e12 each: product overflows double, log does not
  DenseMatrix D = DenseMatrix::Zero(40, 40);
  D.diagonal().setConstant(1e12);
  const LogVolume v = volume(D);
  REQUIRE_FALSE(v.is_zero);
  CHECK(v.log_value == doctest::Approx(40.0 * std::log(1e12)).epsilon(1e-10));

  D.diagonal().setConstant(1e-12);  // and underflow likewise
  const LogVolume w = volume(D);
  REQUIRE_FALSE(w.is_zero);
  CHECK(w.log_value == doctest::Approx(-40.0 * std::log(1e12)).epsilon(1e-10));
}

TEST_CASE("volume ratio and improvement gate") {
  const LogVolume a{false, std::log(2.0)};
  const LogVolume b{false, std::log(1.0)};
  CHECK(volume_ratio_log(a, b) == doctest::Approx(std::log(2.0)));

  CHECK(volume_improves(a, b, 0.5));         // 2 > 1.5
  CHECK_FALSE(volume_improves(a, b, 1.0));   // 2 > 2 is false
  CHECK_FALSE(volume_improves(a, b, 1.5));

  const LogVolume zero{};
  CHECK(volume_improves(a, zero, 100.0));    // anything beats zero
  CHECK_FALSE(volume_improves(zero, b, 0.0));
  CHECK_FALSE(volume_improves(zero, zero, 0.0));
}

TEST_CASE("orthogonal factors leave volume unchanged") {
  const DenseMatrix M = random_rank_matrix(6, 4, 4, 5);
  const DenseMatrix Q = random_orthonormal(6, 6, 7);
  const LogVolume a = volume(M);
  const LogVolume b = volume(Q * M);
  REQUIRE_FALSE(a.is_zero);
  REQUIRE_FALSE(b.is_zero);
  CHECK(a.log_value == doctest::Approx(b.log_value).epsilon(1e-10));
}
