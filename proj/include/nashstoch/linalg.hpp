// Copyright 2026 The NashStoch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NASHSTOCH_LINALG_HPP_
#define NASHSTOCH_LINALG_HPP_

// Small dense linear algebra: a row-major matrix, cyclic Jacobi
// eigendecomposition for symmetric matrices and one-sided Jacobi singular
// values. Sizes here are tens of rows, so clarity wins over blocking.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nashstoch/errors.hpp"

namespace nashstoch {

class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * cols, fill) {}

  static Matrix Identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int r, int c) {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  Matrix Transposed() const {
    Matrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  std::vector<double> Apply(std::span<const double> v) const {
    if (static_cast<int>(v.size()) != cols_)
      throw ValidationError("matrix-vector shape mismatch");
    std::vector<double> out(rows_, 0.0);
    for (int r = 0; r < rows_; ++r) {
      double acc = 0.0;
      for (int c = 0; c < cols_; ++c) acc += (*this)(r, c) * v[c];
      out[r] = acc;
    }
    return out;
  }

  std::vector<double> ApplyTransposed(std::span<const double> v) const {
    if (static_cast<int>(v.size()) != rows_)
      throw ValidationError("matrix-vector shape mismatch");
    std::vector<double> out(cols_, 0.0);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) out[c] += (*this)(r, c) * v[r];
    return out;
  }

  Matrix& operator+=(const Matrix& o) {
    CheckSameShape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    CheckSameShape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  double MaxAbs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double FrobeniusNorm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

 private:
  void CheckSameShape(const Matrix& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_)
      throw ValidationError("matrix shape mismatch");
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ValidationError("matrix product shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

inline Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
inline Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
inline Matrix operator*(double s, Matrix a) { return a *= s; }

// Subtracts each column's mean: [I - (1/a) 1 1^T] z for z with a rows.
inline Matrix CenterColumns(Matrix z) {
  for (int c = 0; c < z.cols(); ++c) {
    double mean = 0.0;
    for (int r = 0; r < z.rows(); ++r) mean += z(r, c);
    mean /= z.rows();
    for (int r = 0; r < z.rows(); ++r) z(r, c) -= mean;
  }
  return z;
}

inline double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double Norm2(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

inline double NormInf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct EigenResult {
  std::vector<double> values;  // descending
  Matrix vectors;              // column i pairs with values[i]
  int sweeps = 0;
  double off_norm = 0.0;
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Iterates until the
// off-diagonal Frobenius norm falls below `tol` (floored at a small multiple
// of machine precision times the matrix norm).
inline EigenResult JacobiEigen(Matrix a, double tol = 1e-10,
                               int max_sweeps = 100) {
  const int n = a.rows();
  if (a.cols() != n) throw ValidationError("JacobiEigen needs a square matrix");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double s = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = a(j, i) = s;
    }
  Matrix v = Matrix::Identity(n);
  auto off_norm = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };
  const double threshold = std::max(tol, 1e-15 * a.FrobeniusNorm());
  EigenResult result;
  double off = off_norm();
  int sweep = 0;
  while (off > threshold && sweep < max_sweeps) {
    ++sweep;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    off = off_norm();
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return a(x, x) > a(y, y); });
  result.values.resize(n);
  result.vectors = Matrix(n, n);
  for (int i = 0; i < n; ++i) {
    result.values[i] = a(order[i], order[i]);
    for (int k = 0; k < n; ++k) result.vectors(k, i) = v(k, order[i]);
  }
  result.sweeps = sweep;
  result.off_norm = off;
  return result;
}

// Singular values (descending) by one-sided Jacobi rotations on the columns.
inline std::vector<double> SingularValues(Matrix a, double tol = 1e-15,
                                          int max_sweeps = 100) {
  const int m = a.rows();
  const int n = a.cols();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (int i = 0; i < m; ++i) {
          alpha += a(i, p) * a(i, p);
          beta += a(i, q) * a(i, q);
          gamma += a(i, p) * a(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta))
          continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int i = 0; i < m; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += a(i, j) * a(i, j);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

// Number of singular values above `rel_tol` times the largest.
inline int Rank(const Matrix& a, double rel_tol = 1e-8) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  const std::vector<double> sv = SingularValues(a);
  if (sv.empty() || sv.front() == 0.0) return 0;
  int r = 0;
  for (double s : sv)
    if (s > rel_tol * sv.front()) ++r;
  return r;
}

}  // namespace nashstoch

#endif  // NASHSTOCH_LINALG_HPP_
