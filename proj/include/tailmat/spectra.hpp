#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tailmat/jacobi.hpp"
#include "tailmat/matrix.hpp"

namespace tailmat {

// Descending eigen- or singular-value spectrum with its lag and the
// normalization a_np^2 attached (never silently applied).
struct SpectrumResult {
  int lag = 0;
  std::vector<double> values;
  double a_np2 = 0.0;
  bool is_eigen = true;
  bool is_singular = false;
};

// X_n(0) X_n(s)'; not symmetric for s > 0.
inline Matrix autocov(const Panel& x0, const Panel& xs) {
  if (x0.p() != xs.p() || x0.n() != xs.n()) {
    throw std::invalid_argument("autocov: panel shapes differ");
  }
  return multiply_bt(x0.values, xs.values);
}

// Eigenvalues of X X', diagonalizing the smaller Gram matrix.  For p > n the
// nonzero spectra of X X' and X' X coincide, so the n eigenvalues of X' X are
// padded with p - n zeros.
inline SpectrumResult covariance_eigs(const Panel& x, double a_np2 = 0.0) {
  const std::size_t p = x.p(), n = x.n();
  if (p == 0 || n == 0) throw std::invalid_argument("covariance_eigs: empty panel");
  SpectrumResult r;
  r.lag = 0;
  r.a_np2 = a_np2;
  if (p <= n) {
    r.values = sym_eigenvalues(SymMatrix(gram(x.values)));
  } else {
    r.values = sym_eigenvalues(SymMatrix(gram(x.values.transposed())));
    r.values.resize(p, 0.0);
  }
  return r;
}

// Square roots of the eigenvalues of A A' (clipped at zero), min(p,n) values.
inline std::vector<double> singular_values(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return {};
  const Matrix g = a.rows() <= a.cols() ? gram(a) : gram(a.transposed());
  std::vector<double> vals = sym_eigenvalues(SymMatrix(g));
  for (double& v : vals) v = v > 0.0 ? std::sqrt(v) : 0.0;
  return vals;
}

inline double spectral_norm(const Matrix& a) {
  const std::vector<double> sv = singular_values(a);
  return sv.empty() ? 0.0 : sv.front();
}

struct DiagGapResult {
  double normalized_offdiag_norm;  // a2^{-1} ||XX' - diag(XX')||_2
  double weyl_gap;                 // max_i |lambda_(i) - lambda_(i)(diag)|
  double offdiag_norm;             // ||XX' - diag(XX')||_2
  bool weyl_ok;                    // weyl_gap <= offdiag_norm
};

// Distance of X X' from its diagonal in spectral norm, with the Weyl bound
// check on the resulting eigenvalue perturbation.
inline DiagGapResult diag_gap(const Panel& x, double a2) {
  if (a2 <= 0.0) throw std::invalid_argument("diag_gap: a2 must be positive");
  Matrix g = gram(x.values);
  const std::size_t p = g.rows();
  std::vector<double> diag(p);
  for (std::size_t i = 0; i < p; ++i) {
    diag[i] = g(i, i);
    g(i, i) = 0.0;
  }
  std::vector<double> off_eigs = sym_eigenvalues(SymMatrix(std::move(g)));
  double off_norm = 0.0;
  for (double v : off_eigs) off_norm = std::max(off_norm, std::abs(v));

  // eigenvalues of the full matrix vs the sorted diagonal
  Matrix full = gram(x.values);
  std::vector<double> lam = sym_eigenvalues(SymMatrix(std::move(full)));
  std::sort(diag.begin(), diag.end(), std::greater<double>());
  double gap = 0.0;
  for (std::size_t i = 0; i < p; ++i) gap = std::max(gap, std::abs(lam[i] - diag[i]));

  DiagGapResult r;
  r.offdiag_norm = off_norm;
  r.normalized_offdiag_norm = off_norm / a2;
  r.weyl_gap = gap;
  r.weyl_ok = gap <= off_norm * (1.0 + 1e-10) + 1e-10;
  return r;
}

// Eigenvalues of sum_{s=s0}^{s1} A_n(s) A_n(s)' with A_n(s) = X_n(0) X_n(s)'.
inline std::vector<double> sum_squares_eigs(const std::vector<Panel>& xs, std::size_t s0,
                                            std::size_t s1) {
  if (s0 > s1 || s1 >= xs.size()) throw std::invalid_argument("sum_squares_eigs: bad lag range");
  const std::size_t p = xs[0].p(), n = xs[0].n();
  for (const Panel& x : xs) {
    if (x.p() != p || x.n() != n) throw std::invalid_argument("sum_squares_eigs: shape mismatch");
  }
  Matrix sum(p, p);
  for (std::size_t s = s0; s <= s1; ++s) {
    const Matrix a = multiply_bt(xs[0].values, xs[s].values);
    sum += gram(a);
  }
  return sym_eigenvalues(SymMatrix(std::move(sum)));
}

}  // namespace tailmat
