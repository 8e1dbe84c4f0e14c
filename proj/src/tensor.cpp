#include "vpmm/tensor.hpp"

#include <cmath>
#include <string>

namespace vpmm {

Mat Mat::identity(int d) {
  Mat m(d);
  for (int i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diag(double x, double y) {
  Mat m(2);
  m(0, 0) = x;
  m(1, 1) = y;
  return m;
}

Mat Mat::diag(double x, double y, double z) {
  Mat m(3);
  m(0, 0) = x;
  m(1, 1) = y;
  m(2, 2) = z;
  return m;
}

Mat Mat::operator+(const Mat& o) const {
  require_same_dim(*this, o, "Mat::operator+");
  Mat r(dim);
  for (int k = 0; k < dim * dim; ++k) r.a[k] = a[k] + o.a[k];
  return r;
}

Mat Mat::operator-(const Mat& o) const {
  require_same_dim(*this, o, "Mat::operator-");
  Mat r(dim);
  for (int k = 0; k < dim * dim; ++k) r.a[k] = a[k] - o.a[k];
  return r;
}

Mat Mat::operator*(double s) const {
  Mat r(dim);
  for (int k = 0; k < dim * dim; ++k) r.a[k] = a[k] * s;
  return r;
}

Mat& Mat::operator+=(const Mat& o) {
  require_same_dim(*this, o, "Mat::operator+=");
  for (int k = 0; k < dim * dim; ++k) a[k] += o.a[k];
  return *this;
}

Mat Mat::operator*(const Mat& o) const {
  require_same_dim(*this, o, "Mat::operator*");
  Mat r(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double s = 0.0;
      for (int k = 0; k < dim; ++k) s += (*this)(i, k) * o(k, j);
      r(i, j) = s;
    }
  return r;
}

Mat Mat::transpose() const {
  Mat r(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) r(i, j) = (*this)(j, i);
  return r;
}

double Mat::trace() const {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += (*this)(i, i);
  return s;
}

bool Mat::all_finite() const {
  for (int k = 0; k < dim * dim; ++k)
    if (!std::isfinite(a[k])) return false;
  return true;
}

Mat operator*(double s, const Mat& m) { return m * s; }

Vec Vec::of(double x, double y) {
  Vec r(2);
  r[0] = x;
  r[1] = y;
  return r;
}

Vec Vec::of(double x, double y, double z) {
  Vec r(3);
  r[0] = x;
  r[1] = y;
  r[2] = z;
  return r;
}

Vec Vec::operator+(const Vec& o) const {
  Vec r(dim);
  for (int i = 0; i < dim; ++i) r[i] = (*this)[i] + o[i];
  return r;
}

Vec Vec::operator-(const Vec& o) const {
  Vec r(dim);
  for (int i = 0; i < dim; ++i) r[i] = (*this)[i] - o[i];
  return r;
}

Vec Vec::operator*(double s) const {
  Vec r(dim);
  for (int i = 0; i < dim; ++i) r[i] = (*this)[i] * s;
  return r;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim; ++i) s += a[i] * b[i];
  return s;
}

Vec mat_vec(const Mat& A, const Vec& x) {
  Vec r(A.dim);
  for (int i = 0; i < A.dim; ++i) {
    double s = 0.0;
    for (int j = 0; j < A.dim; ++j) s += A(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

void require_same_dim(const Mat& A, const Mat& B, const char* where) {
  if (A.dim != B.dim)
    throw DimensionMismatch(std::string(where) + ": dimensions " + std::to_string(A.dim) +
                            " vs " + std::to_string(B.dim));
}

double frobenius_inner(const Mat& A, const Mat& B) {
  require_same_dim(A, B, "frobenius_inner");
  double s = 0.0;
  for (int k = 0; k < A.dim * A.dim; ++k) s += A.a[k] * B.a[k];
  return s;
}

double frobenius_norm(const Mat& A) { return std::sqrt(frobenius_inner(A, A)); }

double det(const Mat& A) {
  if (A.dim == 2) return A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  return A(0, 0) * (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)) -
         A(0, 1) * (A(1, 0) * A(2, 2) - A(1, 2) * A(2, 0)) +
         A(0, 2) * (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0));
}

Mat cofactor(const Mat& A) {
  Mat c(A.dim);
  if (A.dim == 2) {
    c(0, 0) = A(1, 1);
    c(0, 1) = -A(1, 0);
    c(1, 0) = -A(0, 1);
    c(1, 1) = A(0, 0);
    return c;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
      const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      // signed 2x2 minor; the cyclic index choice carries the sign
      c(i, j) = A(i1, j1) * A(i2, j2) - A(i1, j2) * A(i2, j1);
    }
  return c;
}

Mat inverse_glplus(const Mat& A, double det_floor) {
  const double d = det(A);
  if (!(d > det_floor))
    throw DeterminantNotPositive("inverse_glplus: det = " + std::to_string(d) +
                                 " <= floor " + std::to_string(det_floor));
  return cofactor(A).transpose() * (1.0 / d);
}

namespace {

// Lexicographic size-s subsets of {0..d-1}.
std::vector<std::vector<int>> subsets(int d, int s) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) cur[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(cur);
    int k = s - 1;
    while (k >= 0 && cur[static_cast<std::size_t>(k)] == d - s + k) --k;
    if (k < 0) break;
    ++cur[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < s; ++j)
      cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

double submatrix_det(const Mat& A, const std::vector<int>& rows, const std::vector<int>& cols) {
  const std::size_t s = rows.size();
  if (s == 1) return A(rows[0], cols[0]);
  if (s == 2)
    return A(rows[0], cols[0]) * A(rows[1], cols[1]) - A(rows[0], cols[1]) * A(rows[1], cols[0]);
  Mat sub(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      sub(i, j) = A(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
  return det(sub);
}

}  // namespace

MinorBlock order_minors(const Mat& A, int s) {
  const auto subs = subsets(A.dim, s);
  MinorBlock b;
  b.n = static_cast<int>(subs.size());
  b.v.resize(static_cast<std::size_t>(b.n) * static_cast<std::size_t>(b.n));
  for (int i = 0; i < b.n; ++i)
    for (int j = 0; j < b.n; ++j)
      b.v[static_cast<std::size_t>(i * b.n + j)] =
          submatrix_det(A, subs[static_cast<std::size_t>(i)], subs[static_cast<std::size_t>(j)]);
  return b;
}

MinorBlock minor_block_product(const MinorBlock& X, const MinorBlock& Y) {
  MinorBlock r;
  r.n = X.n;
  r.v.assign(static_cast<std::size_t>(r.n) * static_cast<std::size_t>(r.n), 0.0);
  for (int i = 0; i < r.n; ++i)
    for (int j = 0; j < r.n; ++j) {
      double s = 0.0;
      for (int k = 0; k < r.n; ++k) s += X(i, k) * Y(k, j);
      r.v[static_cast<std::size_t>(i * r.n + j)] = s;
    }
  return r;
}

MinorVector minors_all(const Mat& A) {
  MinorVector mv;
  mv.dim = A.dim;
  mv.values.reserve(static_cast<std::size_t>(MinorVector::length(A.dim)));
  for (int s = 1; s <= A.dim; ++s) {
    const MinorBlock b = order_minors(A, s);
    mv.values.insert(mv.values.end(), b.v.begin(), b.v.end());
  }
  return mv;
}

double distance_to_identity(const Mat& N) {
  return frobenius_norm(N - Mat::identity(N.dim));
}

}  // namespace vpmm
