#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

#include "tailmat/matrix.hpp"
#include "tailmat/spectra.hpp"

namespace tailmat {

// Order statistics of the squared noise panel plus its row and column sums.
struct OrderStats {
  std::size_t p = 0, n = 0;
  std::vector<double> z2_desc;        // all p*n squared entries, descending
  std::vector<double> row_sums;       // D_i^-> in row order
  std::vector<double> col_sums;       // D_t^v in column order
  std::vector<double> row_sums_desc;
  std::vector<double> col_sums_desc;
};

inline OrderStats order_stats(const Panel& z) {
  OrderStats s;
  s.p = z.p();
  s.n = z.n();
  s.z2_desc.reserve(s.p * s.n);
  s.row_sums.assign(s.p, 0.0);
  s.col_sums.assign(s.n, 0.0);
  for (std::size_t i = 0; i < s.p; ++i) {
    const double* row = z.values.row(i);
    for (std::size_t t = 0; t < s.n; ++t) {
      const double sq = row[t] * row[t];
      s.z2_desc.push_back(sq);
      s.row_sums[i] += sq;
      s.col_sums[t] += sq;
    }
  }
  std::sort(s.z2_desc.begin(), s.z2_desc.end(), std::greater<double>());
  s.row_sums_desc = s.row_sums;
  s.col_sums_desc = s.col_sums;
  std::sort(s.row_sums_desc.begin(), s.row_sums_desc.end(), std::greater<double>());
  std::sort(s.col_sums_desc.begin(), s.col_sums_desc.end(), std::greater<double>());
  return s;
}

enum class ApproxKind { delta, gamma_right, gamma_down };

// Top-m values of a product set {base_i * v_j}, with the lag and the v used.
struct ApproxSet {
  ApproxKind kind = ApproxKind::delta;
  int lag = 0;
  std::vector<double> values;  // descending, size m
  std::vector<double> v_used;
};

namespace detail {

// Top-m of {bases[i] * v[j]} for two descending nonnegative lists, via a
// k-way merge over the v-columns; ties prefer the smaller j.
inline std::vector<double> top_products(std::span<const double> bases, std::span<const double> v,
                                        std::size_t m) {
  if (v.empty()) throw std::invalid_argument("top_products: empty v");
  if (bases.empty()) throw std::invalid_argument("top_products: empty base set");
  m = std::min(m, bases.size() * v.size());

  struct Node {
    double value;
    std::size_t i, j;
  };
  auto cmp = [](const Node& a, const Node& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.j != b.j) return a.j > b.j;
    return a.i > b.i;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);
  for (std::size_t j = 0; j < v.size(); ++j) heap.push({bases[0] * v[j], 0, j});

  std::vector<double> out;
  out.reserve(m);
  while (out.size() < m) {
    const Node top = heap.top();
    heap.pop();
    out.push_back(top.value);
    if (top.i + 1 < bases.size()) heap.push({bases[top.i + 1] * v[top.j], top.i + 1, top.j});
  }
  return out;
}

}  // namespace detail

// delta / gamma-> / gamma-v approximation sets: largest m products of the
// chosen source statistics with the singular values v_j(s).
inline ApproxSet approx_set(const OrderStats& stats, std::span<const double> v, ApproxKind kind,
                            std::size_t m, int lag = 0) {
  if (v.empty()) throw std::invalid_argument("approx_set: empty v");
  for (std::size_t j = 1; j < v.size(); ++j) {
    if (v[j] > v[j - 1]) throw std::invalid_argument("approx_set: v must be descending");
  }
  if (v.front() < 0.0) throw std::invalid_argument("approx_set: v must be nonnegative");

  std::span<const double> bases;
  std::size_t limit = 0;
  switch (kind) {
    case ApproxKind::delta:
      limit = std::min(stats.p, stats.z2_desc.size());
      bases = std::span<const double>(stats.z2_desc).first(limit);
      break;
    case ApproxKind::gamma_right:
      bases = stats.row_sums_desc;
      break;
    case ApproxKind::gamma_down:
      bases = stats.col_sums_desc;
      break;
  }
  ApproxSet out;
  out.kind = kind;
  out.lag = lag;
  out.v_used.assign(v.begin(), v.end());
  out.values = detail::top_products(bases, v, m);
  return out;
}

// omega set for sums of squares: products of the fourth-power order
// statistics with the eigenvalues v_j(s0,s1); comparisons use a_np^4.
inline ApproxSet omega_set(const OrderStats& stats, std::span<const double> v_sum, std::size_t m) {
  if (v_sum.empty()) throw std::invalid_argument("omega_set: empty v");
  const std::size_t limit = std::min(stats.p, stats.z2_desc.size());
  std::vector<double> z4(limit);
  for (std::size_t i = 0; i < limit; ++i) z4[i] = stats.z2_desc[i] * stats.z2_desc[i];
  ApproxSet out;
  out.kind = ApproxKind::delta;
  out.v_used.assign(v_sum.begin(), v_sum.end());
  out.values = detail::top_products(z4, v_sum, m);
  return out;
}

struct SupError {
  double sup = 0.0;                  // a2^{-power} * max_i |lambda^power - approx^power|
  std::vector<double> signed_errors; // per-index normalized signed errors
};

// Normalized sup distance between a spectrum and an approximation set, with
// the per-index signed errors kept for density plots.
inline SupError sup_error(const SpectrumResult& spec, const ApproxSet& approx, double a2,
                          int power) {
  if (power != 1 && power != 2) throw std::invalid_argument("sup_error: power must be 1 or 2");
  if (a2 <= 0.0) throw std::invalid_argument("sup_error: a2 must be positive");
  const std::size_t len = spec.values.size();
  if (approx.values.size() < len) throw std::invalid_argument("sup_error: length mismatch");
  const double scale = power == 1 ? a2 : a2 * a2;
  SupError out;
  out.signed_errors.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    const double lam = power == 1 ? spec.values[i] : spec.values[i] * spec.values[i];
    const double app = power == 1 ? approx.values[i] : approx.values[i] * approx.values[i];
    const double err = (lam - app) / scale;
    out.signed_errors[i] = err;
    out.sup = std::max(out.sup, std::abs(err));
  }
  return out;
}

}  // namespace tailmat
