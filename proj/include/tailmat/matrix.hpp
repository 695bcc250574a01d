#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace tailmat {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::span<const double> flat() const { return data_; }
  std::span<double> flat() { return data_; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw std::invalid_argument("matrix shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

// A * B' for row-major A (p x n), B (q x n): rows stream contiguously.
inline Matrix multiply_bt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("multiply_bt: inner dimension mismatch");
  const std::size_t p = a.rows(), q = b.rows(), n = a.cols();
  Matrix out(p, q);
  for (std::size_t i = 0; i < p; ++i) {
    const double* ai = a.row(i);
    for (std::size_t j = 0; j < q; ++j) {
      const double* bj = b.row(j);
      double s = 0.0;
      for (std::size_t t = 0; t < n; ++t) s += ai[t] * bj[t];
      out(i, j) = s;
    }
  }
  return out;
}

// A * A', exploiting symmetry (upper triangle computed, mirrored).
inline Matrix gram(const Matrix& a) {
  const std::size_t p = a.rows(), n = a.cols();
  Matrix out(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    const double* ai = a.row(i);
    for (std::size_t j = i; j < p; ++j) {
      const double* aj = a.row(j);
      double s = 0.0;
      for (std::size_t t = 0; t < n; ++t) s += ai[t] * aj[t];
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

inline double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.flat()) s += v * v;
  return std::sqrt(s);
}

enum class PanelRole { noise, field, returns_data };

// p x n data matrix tagged with its role in the pipeline.
struct Panel {
  Matrix values;
  PanelRole role = PanelRole::field;
  int lag = 0;

  std::size_t p() const { return values.rows(); }
  std::size_t n() const { return values.cols(); }
};

}  // namespace tailmat
