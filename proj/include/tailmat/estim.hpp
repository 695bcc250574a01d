#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailmat/jacobi.hpp"
#include "tailmat/limits.hpp"
#include "tailmat/matrix.hpp"
#include "tailmat/spectra.hpp"

namespace tailmat {

// p return series by n observations, one row per series.
struct ReturnsPanel {
  Matrix values;
  std::vector<std::string> labels;

  std::size_t p() const { return values.rows(); }
  std::size_t n() const { return values.cols(); }
};

// Hill estimator on the k largest of the positive sample values:
// alpha_hat = [ (1/k) sum_{i<=k} log(Y_(i)/Y_(k+1)) ]^{-1}.
inline double hill(std::span<const double> sample, std::size_t k) {
  if (k < 2) throw std::invalid_argument("hill: k must be >= 2");
  std::vector<double> pos;
  pos.reserve(sample.size());
  for (double v : sample) {
    if (v > 0.0) pos.push_back(v);
  }
  if (pos.size() < k + 1) throw std::invalid_argument("hill: not enough positive observations");
  std::partial_sort(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(k + 1), pos.end(),
                    std::greater<double>());
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) acc += std::log(pos[i] / pos[k]);
  return static_cast<double>(k) / acc;
}

struct TailIndexPair {
  double alpha_lower = 0.0;  // from losses
  double alpha_upper = 0.0;  // from gains
  std::size_t k = 0;
  bool lower_ok = false;
  bool upper_ok = false;
};

// Per-row (alpha_L, alpha_U) Hill pairs; rows with too few sign-specific
// observations are flagged, not fatal.
inline std::vector<TailIndexPair> tail_pairs(const ReturnsPanel& panel, std::size_t k) {
  std::vector<TailIndexPair> out(panel.p());
  for (std::size_t i = 0; i < panel.p(); ++i) {
    std::vector<double> gains, losses;
    for (std::size_t t = 0; t < panel.n(); ++t) {
      const double v = panel.values(i, t);
      if (v > 0.0) gains.push_back(v);
      if (v < 0.0) losses.push_back(-v);
    }
    TailIndexPair& pair = out[i];
    pair.k = k;
    try {
      pair.alpha_upper = hill(gains, k);
      pair.upper_ok = true;
    } catch (const std::invalid_argument&) {
    }
    try {
      pair.alpha_lower = hill(losses, k);
      pair.lower_ok = true;
    } catch (const std::invalid_argument&) {
    }
  }
  return out;
}

// Rank transform X_it = -1 / log(rank_it / (n+1)) with stable within-row
// ranks (ties keep observation order).  Rows then have approximately
// standard-Frechet marginals.
inline Panel rank_transform(const ReturnsPanel& panel) {
  if (panel.n() < 2) throw std::invalid_argument("rank_transform: need n >= 2");
  Panel out;
  out.values = Matrix(panel.p(), panel.n());
  out.role = PanelRole::field;
  std::vector<std::size_t> idx(panel.n());
  for (std::size_t i = 0; i < panel.p(); ++i) {
    const double* row = panel.values.row(i);
    const bool constant_row =
        std::all_of(row, row + panel.n(), [&](double v) { return v == row[0]; });
    if (constant_row) throw std::invalid_argument("rank_transform: constant row (all ranks tied)");
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
    const double denom = static_cast<double>(panel.n()) + 1.0;
    for (std::size_t r = 0; r < panel.n(); ++r) {
      const double u = (static_cast<double>(r) + 1.0) / denom;
      out.values(i, idx[r]) = -1.0 / std::log(u);
    }
  }
  return out;
}

struct EigenRatioRow {
  int i = 0;
  double observed_log_ratio = 0.0;  // log(lambda_(i+1)/lambda_(i))
  double band_low = 0.0;            // 1% quantile of log((Gamma_i/Gamma_{i+1})^{2/alpha})
  double band_median = 0.0;
  double band_high = 0.0;           // 99%
};

// Consecutive-eigenvalue log-ratios of X X' against the rank-one limit bands.
inline std::vector<EigenRatioRow> eigen_ratio_report(const Panel& x, int m,
                                                     double alpha_for_bands) {
  if (m < 1 || static_cast<std::size_t>(m) >= x.p()) {
    throw std::invalid_argument("eigen_ratio_report: need 1 <= m < p");
  }
  const SpectrumResult spec = covariance_eigs(x);
  std::vector<EigenRatioRow> rows;
  rows.reserve(static_cast<std::size_t>(m));
  for (int i = 1; i <= m; ++i) {
    const double hi = spec.values[static_cast<std::size_t>(i - 1)];
    const double lo = spec.values[static_cast<std::size_t>(i)];
    if (!(lo > 0.0)) throw std::runtime_error("eigen_ratio_report: degenerate spectrum");
    EigenRatioRow row;
    row.i = i;
    row.observed_log_ratio = std::log(lo / hi);
    row.band_low = std::log(ratio_law_quantile(i, alpha_for_bands, 0.01));
    row.band_median = std::log(ratio_law_quantile(i, alpha_for_bands, 0.50));
    row.band_high = std::log(ratio_law_quantile(i, alpha_for_bands, 0.99));
    rows.push_back(row);
  }
  return rows;
}

struct LamYaoRow {
  int s1 = 0;
  double lambda1_of_sum = 0.0;  // lambda_(1)(sum_{s<=s1} A A')
  double sum_of_lambda1 = 0.0;  // sum_{s<=s1} lambda_(1)(A A')
  double ratio = 0.0;           // <= 1
};

// Largest eigenvalue of the summed squares vs the summed largest eigenvalues,
// per cutoff lag s1 = 0..s_max.
inline std::vector<LamYaoRow> lamyao_report(std::span<const Panel> xs) {
  if (xs.empty()) throw std::invalid_argument("lamyao_report: no panels");
  const std::size_t p = xs[0].p();
  Matrix running(p, p);
  double lambda_sum = 0.0;
  std::vector<LamYaoRow> rows;
  for (std::size_t s = 0; s < xs.size(); ++s) {
    const Matrix a = multiply_bt(xs[0].values, xs[s].values);
    const Matrix sq = gram(a);
    running += sq;
    lambda_sum += sym_eigenvalues(SymMatrix(sq)).front();
    LamYaoRow row;
    row.s1 = static_cast<int>(s);
    row.lambda1_of_sum = sym_eigenvalues(SymMatrix(running)).front();
    row.sum_of_lambda1 = lambda_sum;
    row.ratio = row.lambda1_of_sum / row.sum_of_lambda1;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tailmat
