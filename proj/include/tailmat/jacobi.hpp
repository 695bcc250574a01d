#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "tailmat/matrix.hpp"

namespace tailmat {

// Symmetric matrix wrapper; symmetry is checked (relative to the largest
// entry) and the stored copy exactly symmetrized.
class SymMatrix {
 public:
  explicit SymMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("SymMatrix needs a square matrix");
    double max_abs = 0.0;
    for (double v : m_.flat()) max_abs = std::max(max_abs, std::abs(v));
    const double tol = 1e-12 * std::max(1.0, max_abs);
    for (std::size_t i = 0; i < m_.rows(); ++i) {
      for (std::size_t j = i + 1; j < m_.cols(); ++j) {
        if (std::abs(m_(i, j) - m_(j, i)) > tol) {
          throw std::invalid_argument("SymMatrix: input is not symmetric");
        }
        const double v = 0.5 * (m_(i, j) + m_(j, i));
        m_(i, j) = v;
        m_(j, i) = v;
      }
    }
  }

  std::size_t dim() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }

 private:
  Matrix m_;
};

struct EigenResult {
  std::vector<double> values;  // descending
  Matrix vectors;              // orthonormal columns, empty when not requested
};

namespace detail {

// Cyclic Jacobi with the usual small-element threshold.  The full matrix is
// kept symmetric so each rotation touches two contiguous rows, mirrored back
// into the columns afterwards.  Rotations run until the off-diagonal
// Frobenius mass drops below 1e-12 * ||m||_F, sweep cap 30.
inline EigenResult jacobi_eigen(const Matrix& input, bool want_vectors) {
  const std::size_t n = input.rows();
  if (n == 0) return {};
  if (n == 1) {
    EigenResult r;
    r.values = {input(0, 0)};
    if (want_vectors) r.vectors = Matrix::identity(1);
    return r;
  }

  Matrix a = input;
  Matrix vt = want_vectors ? Matrix::identity(n) : Matrix();  // rows are eigenvectors
  std::vector<double> d(n), b(n), z(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = b[i] = a(i, i);

  const double target = 1e-12 * frobenius_norm(input);
  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
  };

  const int sweep_cap = 30;
  bool converged = false;
  for (int sweep = 1; sweep <= sweep_cap; ++sweep) {
    double sm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) sm += std::abs(a(i, j));
    if (sm == 0.0 || off_norm() <= target) {
      converged = true;
      break;
    }
    const double thresh = (sweep < 4) ? 0.2 * sm / (n * n) : 0.0;

    for (std::size_t ip = 0; ip + 1 < n; ++ip) {
      for (std::size_t iq = ip + 1; iq < n; ++iq) {
        const double apq = a(ip, iq);
        const double g = 100.0 * std::abs(apq);
        if (sweep > 4 && g <= 1e-15 * std::abs(d[ip]) && g <= 1e-15 * std::abs(d[iq])) {
          a(ip, iq) = 0.0;
          a(iq, ip) = 0.0;
          continue;
        }
        if (std::abs(apq) <= thresh) continue;

        double h = d[iq] - d[ip];
        double t;
        if (g <= 1e-15 * std::abs(h)) {
          t = apq / h;
        } else {
          const double theta = 0.5 * h / apq;
          t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        h = t * apq;
        z[ip] -= h;
        z[iq] += h;
        d[ip] -= h;
        d[iq] += h;

        double* rp = a.row(ip);
        double* rq = a.row(iq);
        for (std::size_t j = 0; j < n; ++j) {
          const double gj = rp[j];
          const double hj = rq[j];
          rp[j] = gj - s * (hj + gj * tau);
          rq[j] = hj + s * (gj - hj * tau);
        }
        // restore the pivot block and mirror rows into columns
        rp[ip] = d[ip];
        rq[iq] = d[iq];
        rp[iq] = 0.0;
        rq[ip] = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          a(j, ip) = rp[j];
          a(j, iq) = rq[j];
        }

        if (want_vectors) {
          double* vp = vt.row(ip);
          double* vq = vt.row(iq);
          for (std::size_t j = 0; j < n; ++j) {
            const double gj = vp[j];
            const double hj = vq[j];
            vp[j] = gj - s * (hj + gj * tau);
            vq[j] = hj + s * (gj - hj * tau);
          }
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      b[i] += z[i];
      d[i] = b[i];
      z[i] = 0.0;
      a(i, i) = d[i];
    }
  }
  if (!converged && off_norm() > target) {
    throw std::runtime_error("jacobi_eigen: no convergence within sweep cap");
  }

  // descending order, stable under ties
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return d[x] > d[y]; });

  EigenResult r;
  r.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) r.values[k] = d[idx[k]];
  if (want_vectors) {
    r.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) r.vectors(j, k) = vt(idx[k], j);
  }
  return r;
}

}  // namespace detail

inline EigenResult sym_eigen(const SymMatrix& m, bool want_vectors = true) {
  return detail::jacobi_eigen(m.mat(), want_vectors);
}

inline std::vector<double> sym_eigenvalues(const SymMatrix& m) {
  return detail::jacobi_eigen(m.mat(), false).values;
}

}  // namespace tailmat
