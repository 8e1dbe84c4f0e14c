#ifndef VPMM_TENSOR_HPP
#define VPMM_TENSOR_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "vpmm/errors.hpp"

namespace vpmm {

// Dense d x d matrix, d in {2,3}. Row-major storage, value semantics.
// Carrier for deformation gradients, plastic tensors, rates and stresses.
struct Mat {
  int dim = 2;
  std::array<double, 9> a{};

  Mat() = default;
  explicit Mat(int d) : dim(d) { a.fill(0.0); }

  static Mat identity(int d);
  static Mat diag(double x, double y);
  static Mat diag(double x, double y, double z);

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * dim + j)]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * dim + j)]; }

  Mat operator+(const Mat& o) const;
  Mat operator-(const Mat& o) const;
  Mat operator*(double s) const;
  Mat& operator+=(const Mat& o);
  Mat operator*(const Mat& o) const;  // matrix product

  Mat transpose() const;
  double trace() const;
  bool all_finite() const;
};

Mat operator*(double s, const Mat& m);

// Small vector in R^d.
struct Vec {
  int dim = 2;
  std::array<double, 3> v{};

  Vec() = default;
  explicit Vec(int d) : dim(d) { v.fill(0.0); }
  static Vec of(double x, double y);
  static Vec of(double x, double y, double z);

  double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

  Vec operator+(const Vec& o) const;
  Vec operator-(const Vec& o) const;
  Vec operator*(double s) const;
};

double dot(const Vec& a, const Vec& b);
Vec mat_vec(const Mat& A, const Vec& x);

// Third-order d x d x d array stored as d matrix slices (slice k = d_k P).
using Grad3 = std::vector<Mat>;

// All minors of a matrix, concatenated order by order.
// mu_2 = 5, mu_3 = 19.
struct MinorVector {
  int dim = 2;
  std::vector<double> values;

  static int length(int d) { return d == 2 ? 5 : 19; }
};

// Square block of all order-s minors, indexed by lexicographic row/column
// subsets. Satisfies the compound-matrix product rule.
struct MinorBlock {
  int n = 0;  // C(d,s)
  std::vector<double> v;

  double operator()(int i, int j) const { return v[static_cast<std::size_t>(i * n + j)]; }
};

double frobenius_inner(const Mat& A, const Mat& B);
double frobenius_norm(const Mat& A);
double det(const Mat& A);
Mat cofactor(const Mat& A);

// Inverse through the cofactor formula; requires det(A) > det_floor > 0.
Mat inverse_glplus(const Mat& A, double det_floor = 1e-12);

// Order-s minor block, s in 1..d, subsets enumerated lexicographically.
MinorBlock order_minors(const Mat& A, int s);
MinorBlock minor_block_product(const MinorBlock& X, const MinorBlock& Y);

// Concatenation of all order-s blocks, row-subset-major within each block;
// the final entry is det(A).
MinorVector minors_all(const Mat& A);

// |N - 1| in the Frobenius norm.
double distance_to_identity(const Mat& N);

void require_same_dim(const Mat& A, const Mat& B, const char* where);

}  // namespace vpmm

#endif
