#include <doctest.h>

#include <cmath>
#include <random>

#include "vpmm/diagnostics.hpp"
#include "vpmm/tensor.hpp"

using namespace vpmm;

namespace {

Mat from_rows(double a, double b, double c, double d) {
  Mat m(2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

}  // namespace

TEST_CASE("frobenius inner product") {
  const Mat I = Mat::identity(2);
  CHECK(frobenius_inner(I, I) == doctest::Approx(2.0));

  const Mat A = from_rows(1, 2, 3, 4);
  const Mat B = from_rows(5, 6, 7, 8);
  CHECK(frobenius_inner(A, B) == doctest::Approx(70.0));  // 5+12+21+32

  CHECK(frobenius_inner(Mat(2), B) == 0.0);
  CHECK(frobenius_norm(I) == doctest::Approx(std::sqrt(2.0)));

  CHECK_THROWS_AS(frobenius_inner(Mat(2), Mat(3)), DimensionMismatch);
}

TEST_CASE("cofactor matrix") {
  const Mat D = Mat::diag(2, 3);
  const Mat cD = cofactor(D);
  CHECK(cD(0, 0) == 3.0);
  CHECK(cD(1, 1) == 2.0);
  CHECK(cD(0, 1) == 0.0);

  const Mat I3 = Mat::identity(3);
  CHECK(frobenius_norm(cofactor(I3) - I3) == 0.0);

  const Mat A = from_rows(1, 2, 3, 4);
  const Mat cA = cofactor(A);
  CHECK(cA(0, 0) == 4.0);
  CHECK(cA(0, 1) == -3.0);
  CHECK(cA(1, 0) == -2.0);
  CHECK(cA(1, 1) == 1.0);
}

TEST_CASE("cofactor is the determinant derivative") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int d : {2, 3}) {
    for (int s = 0; s < 30; ++s) {
      const Mat A = random_glplus(d, rng, 0.05, 0.8);
      Mat H(d);
      for (int k = 0; k < d * d; ++k) H.a[static_cast<std::size_t>(k)] = u(rng);
      const double h = 1e-6;
      const double fd = (det(A + H * h) - det(A - H * h)) / (2.0 * h);
      const double exact = frobenius_inner(cofactor(A), H);
      CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("inverse on GL+") {
  CHECK(frobenius_norm(inverse_glplus(Mat::identity(2)) - Mat::identity(2)) == 0.0);

  const Mat D = Mat::diag(2, 4);
  const Mat Di = inverse_glplus(D);
  CHECK(Di(0, 0) == doctest::Approx(0.5));
  CHECK(Di(1, 1) == doctest::Approx(0.25));

  CHECK_THROWS_AS(inverse_glplus(Mat::diag(1, -1)), DeterminantNotPositive);
  CHECK_THROWS_AS(inverse_glplus(Mat(2)), DeterminantNotPositive);

  // A A^-1 = 1 to near machine precision on well-conditioned samples
  std::mt19937_64 rng(3);
  for (int d : {2, 3}) {
    for (int s = 0; s < 50; ++s) {
      const Mat A = random_glplus(d, rng, 0.1, 0.9);
      const Mat R = A * inverse_glplus(A) - Mat::identity(d);
      CHECK(frobenius_norm(R) <= 1e-12 * std::max(1.0, frobenius_norm(A)));
    }
  }
}

TEST_CASE("cofactor transpose identity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> scale(0.2, 5.0);
  for (int d : {2, 3}) {
    for (int s = 0; s < 60; ++s) {
      Mat A = random_glplus(d, rng, 0.05, 0.9) * scale(rng);
      const double dA = det(A);
      if (dA < 1e-2 || dA > 1e2) continue;
      const Mat lhs = cofactor(A).transpose();
      const Mat rhs = inverse_glplus(A) * dA;
      CHECK(frobenius_norm(lhs - rhs) <= 1e-11 * std::max(1.0, frobenius_norm(lhs)));
    }
  }
}

TEST_CASE("all minors enumeration") {
  const Mat A = from_rows(1.5, -2.0, 3.25, 4.0);
  const MinorVector mv = minors_all(A);
  REQUIRE(mv.values.size() == 5);
  CHECK(mv.values[0] == 1.5);
  CHECK(mv.values[1] == -2.0);
  CHECK(mv.values[2] == 3.25);
  CHECK(mv.values[3] == 4.0);
  CHECK(mv.values[4] == doctest::Approx(1.5 * 4.0 + 2.0 * 3.25));

  const MinorVector mi = minors_all(Mat::identity(3));
  REQUIRE(mi.values.size() == 19);
  // order-1 block: the entries; order-2 block: 2x2 identity minors; then det
  int ones = 0;
  for (double v : mi.values) {
    CHECK((v == 0.0 || v == 1.0));
    if (v == 1.0) ++ones;
  }
  CHECK(ones == 7);  // 3 diagonal entries + 3 diagonal 2x2 minors + det
  CHECK(mi.values[18] == 1.0);
}

TEST_CASE("minor blocks multiply (compound product rule)") {
  std::mt19937_64 rng(23);
  for (int d : {2, 3}) {
    for (int s = 0; s < 40; ++s) {
      const Mat A = random_glplus(d, rng, 0.05, 0.9);
      const Mat B = random_glplus(d, rng, 0.05, 0.9);
      for (int order = 1; order <= d; ++order) {
        const MinorBlock lhs = order_minors(A * B, order);
        const MinorBlock rhs = minor_block_product(order_minors(A, order), order_minors(B, order));
        double nref = 1.0;
        for (double v : lhs.v) nref = std::max(nref, std::abs(v));
        for (std::size_t k = 0; k < lhs.v.size(); ++k)
          CHECK(std::abs(lhs.v[k] - rhs.v[k]) <= 1e-10 * nref);
      }
    }
  }
}

TEST_CASE("distance to identity") {
  CHECK(distance_to_identity(Mat::identity(2)) == 0.0);
  CHECK(distance_to_identity(Mat::diag(1.25, 1.0)) == doctest::Approx(0.25));
  Mat N = Mat::identity(2);
  N(0, 1) = 0.3;
  CHECK(distance_to_identity(N) == doctest::Approx(0.3));
}

TEST_CASE("submultiplicative Frobenius norm") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int d : {2, 3}) {
    for (int s = 0; s < 200; ++s) {
      Mat A(d), B(d);
      for (int k = 0; k < d * d; ++k) {
        A.a[static_cast<std::size_t>(k)] = u(rng);
        B.a[static_cast<std::size_t>(k)] = u(rng);
      }
      CHECK(frobenius_norm(A * B) <=
            frobenius_norm(A) * frobenius_norm(B) * (1.0 + 1e-14));
    }
  }
}
