#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "tailmat/jacobi.hpp"
#include "tailmat/matrix.hpp"
#include "tailmat/rng.hpp"
#include "tailmat/tail_model.hpp"

namespace tailmat {

struct CoeffEntry {
  int k, l;
  double value;
};

// Finite-support coefficient array h_{kl}.  Finite support makes the
// summability requirement automatic and the simulation exact.
class CoeffMatrix {
 public:
  explicit CoeffMatrix(std::vector<CoeffEntry> entries) {
    if (entries.empty()) throw std::invalid_argument("CoeffMatrix: empty support");
    std::map<std::pair<int, int>, double> merged;
    for (const CoeffEntry& e : entries) merged[{e.k, e.l}] += e.value;
    bool nonzero = false;
    k_min_ = merged.begin()->first.first;
    k_max_ = k_min_;
    l_min_ = merged.begin()->first.second;
    l_max_ = l_min_;
    for (const auto& [kl, v] : merged) {
      entries_.push_back({kl.first, kl.second, v});
      nonzero = nonzero || v != 0.0;
      k_min_ = std::min(k_min_, kl.first);
      k_max_ = std::max(k_max_, kl.first);
      l_min_ = std::min(l_min_, kl.second);
      l_max_ = std::max(l_max_, kl.second);
    }
    if (!nonzero) throw std::invalid_argument("CoeffMatrix: all coefficients are zero");
  }

  // iid case: h_00 = 1 only
  static CoeffMatrix identity() { return CoeffMatrix({{0, 0, 1.0}}); }

  // h_{kl} = theta_k c_l with k, l indexing the sequences from 0
  static CoeffMatrix separable(const std::vector<double>& theta, const std::vector<double>& c) {
    if (theta.empty() || c.empty()) throw std::invalid_argument("separable: empty sequence");
    const bool theta_ok = std::any_of(theta.begin(), theta.end(), [](double v) { return v != 0.0; });
    const bool c_ok = std::any_of(c.begin(), c.end(), [](double v) { return v != 0.0; });
    if (!theta_ok || !c_ok) throw std::invalid_argument("separable: all-zero sequence");
    std::vector<CoeffEntry> e;
    for (std::size_t k = 0; k < theta.size(); ++k)
      for (std::size_t l = 0; l < c.size(); ++l)
        e.push_back({static_cast<int>(k), static_cast<int>(l), theta[k] * c[l]});
    return CoeffMatrix(std::move(e));
  }

  const std::vector<CoeffEntry>& entries() const { return entries_; }
  int k_min() const { return k_min_; }
  int k_max() const { return k_max_; }
  int l_min() const { return l_min_; }
  int l_max() const { return l_max_; }
  int row_extent() const { return k_max_ - k_min_ + 1; }
  int col_extent() const { return l_max_ - l_min_ + 1; }

  double value(int k, int l) const {
    for (const CoeffEntry& e : entries_) {
      if (e.k == k && e.l == l) return e.value;
    }
    return 0.0;
  }

 private:
  std::vector<CoeffEntry> entries_;
  int k_min_, k_max_, l_min_, l_max_;
};

// M(s) = H(0) H(s)' restricted to the support's row range, with its singular
// values and rank.
struct MMatrix {
  int lag = 0;
  Matrix m;                      // indices run over [k_min, k_max]
  std::vector<double> singular;  // descending, >= 0
  int rank = 0;

  double frobenius() const { return frobenius_norm(m); }
};

inline MMatrix m_matrix(const CoeffMatrix& coeffs, int s) {
  if (s < 0) throw std::invalid_argument("m_matrix: lag must be nonnegative");
  const int k0 = coeffs.k_min(), k1 = coeffs.k_max();
  const int nrows = k1 - k0 + 1;
  MMatrix out;
  out.lag = s;
  out.m = Matrix(nrows, nrows);
  // (M(s))_{ij} = sum_l h_{i,l} h_{j,l+s}
  for (int i = k0; i <= k1; ++i) {
    for (int j = k0; j <= k1; ++j) {
      double acc = 0.0;
      for (int l = coeffs.l_min(); l <= coeffs.l_max(); ++l) {
        acc += coeffs.value(i, l) * coeffs.value(j, l + s);
      }
      out.m(i - k0, j - k0) = acc;
    }
  }
  std::vector<double> eigs = sym_eigenvalues(SymMatrix(gram(out.m)));
  out.singular.resize(eigs.size());
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    out.singular[i] = eigs[i] > 0.0 ? std::sqrt(eigs[i]) : 0.0;
  }
  const double v1 = out.singular.empty() ? 0.0 : out.singular.front();
  for (double v : out.singular) {
    if (v > 1e-10 * std::max(v1, 1e-300)) ++out.rank;
  }
  return out;
}

// Per-rank tuples (v_j(0), ..., v_j(s_max)) of the lag matrices, the scale
// vectors attached to each limit point in the joint-lag convergence.
inline std::vector<std::vector<double>> lag_value_tuples(const CoeffMatrix& coeffs, int s_max) {
  if (s_max < 0) throw std::invalid_argument("lag_value_tuples: s_max must be >= 0");
  std::vector<std::vector<double>> tuples;
  for (int s = 0; s <= s_max; ++s) {
    const MMatrix ms = m_matrix(coeffs, s);
    if (tuples.empty()) tuples.resize(ms.singular.size());
    for (std::size_t j = 0; j < ms.singular.size(); ++j) tuples[j].push_back(ms.singular[j]);
  }
  return tuples;
}

// Descending eigenvalues v_j(s0,s1) of sum_{s=s0}^{s1} M(s) M(s)'.
inline std::vector<double> sum_squares_m(const CoeffMatrix& coeffs, int s0, int s1) {
  if (s0 < 0 || s0 > s1) throw std::invalid_argument("sum_squares_m: bad lag range");
  Matrix acc;
  for (int s = s0; s <= s1; ++s) {
    Matrix g = gram(m_matrix(coeffs, s).m);
    if (acc.rows() == 0) {
      acc = std::move(g);
    } else {
      acc += g;
    }
  }
  return sym_eigenvalues(SymMatrix(std::move(acc)));
}

struct FieldSpec {
  CoeffMatrix coeffs = CoeffMatrix::identity();
  TailModel noise = TailModel::pareto(1.6);
  std::size_t p = 1, n = 1;
  int s_max = 0;
  std::uint64_t seed = 0;
  std::size_t max_cells = 100'000'000;  // memory budget for the noise panel
  // conditional-on-h mode: when set, the coefficient array is drawn once per
  // replicate from this hook
  std::function<CoeffMatrix(std::uint64_t)> coeff_hook;
};

struct FieldResult {
  std::vector<Panel> x;  // X_n(s) for s = 0..s_max
  Panel z_core;          // the p x n noise block Z_{it}, i=1..p, t=1..n
};

namespace detail {

inline std::uint64_t cell_code(int i, int t) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(t));
}

}  // namespace detail

// Draws one shared noise panel and builds every shifted matrix from it:
// X_n(s)_{it} = sum_{k,l} h_{kl} Z_{i-k, t+s-l}.  Each noise cell (i,t) gets
// its own counter substream keyed by its absolute index, so panel values do
// not depend on the support padding or on s_max.
inline FieldResult simulate_field(const FieldSpec& spec) {
  if (spec.p < 1 || spec.n < 1) throw std::invalid_argument("simulate_field: p, n must be >= 1");
  if (spec.s_max < 0) throw std::invalid_argument("simulate_field: s_max must be >= 0");
  if (spec.p * (spec.n + static_cast<std::size_t>(spec.s_max)) > spec.max_cells) {
    throw std::length_error("simulate_field: panel exceeds the configured memory budget");
  }
  const CoeffMatrix coeffs = spec.coeff_hook ? spec.coeff_hook(spec.seed) : spec.coeffs;

  const int p = static_cast<int>(spec.p);
  const int n = static_cast<int>(spec.n);
  const int row_lo = std::min(1, 1 - coeffs.k_max());
  const int row_hi = std::max(p, p - coeffs.k_min());
  const int col_lo = std::min(1, 1 - coeffs.l_max());
  const int col_hi = std::max(n, n + spec.s_max - coeffs.l_min());
  const std::size_t zrows = static_cast<std::size_t>(row_hi - row_lo + 1);
  const std::size_t zcols = static_cast<std::size_t>(col_hi - col_lo + 1);
  if (zrows * zcols > spec.max_cells) {
    throw std::length_error("simulate_field: padded noise panel exceeds the memory budget");
  }

  const Rng base(spec.seed);
  Matrix z(zrows, zcols);
  for (int i = row_lo; i <= row_hi; ++i) {
    double* zrow = z.row(static_cast<std::size_t>(i - row_lo));
    for (int t = col_lo; t <= col_hi; ++t) {
      Rng cell = base.split(detail::cell_code(i, t));
      zrow[t - col_lo] = spec.noise.draw(cell);
    }
  }

  FieldResult out;
  out.x.reserve(static_cast<std::size_t>(spec.s_max) + 1);
  for (int s = 0; s <= spec.s_max; ++s) {
    Panel panel;
    panel.values = Matrix(spec.p, spec.n);
    panel.role = PanelRole::field;
    panel.lag = s;
    for (const CoeffEntry& e : coeffs.entries()) {
      if (e.value == 0.0) continue;
      for (int i = 1; i <= p; ++i) {
        const double* zrow = z.row(static_cast<std::size_t>(i - e.k - row_lo));
        double* xrow = panel.values.row(static_cast<std::size_t>(i - 1));
        const int off = s - e.l - col_lo;  // column of Z for t = 0
        const double h = e.value;
        for (int t = 1; t <= n; ++t) xrow[t - 1] += h * zrow[t + off];
      }
    }
    out.x.push_back(std::move(panel));
  }

  out.z_core.values = Matrix(spec.p, spec.n);
  out.z_core.role = PanelRole::noise;
  for (int i = 1; i <= p; ++i) {
    for (int t = 1; t <= n; ++t) {
      out.z_core.values(i - 1, t - 1) =
          z(static_cast<std::size_t>(i - row_lo), static_cast<std::size_t>(t - col_lo));
    }
  }
  return out;
}

}  // namespace tailmat
