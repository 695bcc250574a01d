#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "tailmat/rng.hpp"
#include "tailmat/tail_model.hpp"

namespace tailmat {

// Gamma_1 < Gamma_2 < ... : cumulative sums of iid standard exponentials,
// the points of a unit-rate Poisson process.
struct GammaPoints {
  std::vector<double> values;
};

inline GammaPoints gamma_points(std::size_t k, Rng& rng) {
  GammaPoints g;
  g.values.resize(k);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    acc += -std::log(rng.next_open());
    g.values[i] = acc;
  }
  return g;
}

// Frechet distribution function exp(-x^{-theta}).
inline double frechet_cdf(double theta, double x) {
  if (x <= 0.0) throw std::invalid_argument("frechet_cdf: x must be positive");
  return std::exp(-std::pow(x, -theta));
}

// Limit law of the k-th largest normalized eigenvalue:
// P(Gamma_k^{-2/alpha} <= x) = sum_{s<k} mu^s/s! e^{-mu}, mu = x^{-alpha/2}.
inline double kth_max_cdf(int k, double alpha, double x) {
  if (k < 1) throw std::invalid_argument("kth_max_cdf: k must be >= 1");
  if (x <= 0.0) throw std::invalid_argument("kth_max_cdf: x must be positive");
  const double mu = std::pow(x, -0.5 * alpha);
  double term = std::exp(-mu);
  double sum = term;
  for (int s = 1; s < k; ++s) {
    term *= mu / s;
    sum += term;
  }
  return sum;
}

// P((Gamma_i/Gamma_{i+1})^{2/alpha} <= x) = x^{i alpha / 2} on (0,1).
inline double ratio_law_cdf(int i, double alpha, double x) {
  if (i < 1) throw std::invalid_argument("ratio_law_cdf: i must be >= 1");
  if (x <= 0.0 || x >= 1.0) throw std::invalid_argument("ratio_law_cdf: x must be in (0,1)");
  return std::pow(x, 0.5 * i * alpha);
}

inline double ratio_law_quantile(int i, double alpha, double q) {
  if (i < 1) throw std::invalid_argument("ratio_law_quantile: i must be >= 1");
  if (q <= 0.0 || q >= 1.0) throw std::invalid_argument("ratio_law_quantile: q must be in (0,1)");
  return std::pow(q, 2.0 / (i * alpha));
}

// Limit of the self-normalized spectral gap (lambda_(1)-lambda_(2))/lambda_(1)
// for top singular values v1 >= v2 of M: continuous part 1-(1-x)^{alpha/2}
// on (0, 1-v2/v1), atom of mass (v2/v1)^{alpha/2} at 1-v2/v1.  For v2 = 0 the
// law is purely continuous on [0,1].
struct GapLaw {
  double alpha = 1.0;
  double atom_location = 1.0;
  double atom_mass = 0.0;

  double cdf(double x) const {
    if (x < 0.0) return 0.0;
    if (x >= atom_location) return 1.0;
    return 1.0 - std::pow(1.0 - x, 0.5 * alpha);
  }
};

inline GapLaw gap_limit(double alpha, double v1, double v2) {
  if (v1 <= 0.0) throw std::invalid_argument("gap_limit: v1 must be positive");
  if (v2 < 0.0 || v2 > v1) throw std::invalid_argument("gap_limit: need 0 <= v2 <= v1");
  GapLaw law;
  law.alpha = alpha;
  law.atom_location = 1.0 - v2 / v1;
  law.atom_mass = v2 == 0.0 ? 0.0 : std::pow(v2 / v1, 0.5 * alpha);
  return law;
}

// One draw of the lambda_(2)/lambda_(1) limit:
// (v2/v1) 1{U < (v2/v1)^{alpha/2}} + U^{2/alpha} 1{U >= (v2/v1)^{alpha/2}}.
inline double ratio21_limit_sample(double alpha, double v1, double v2, Rng& rng) {
  if (v1 <= 0.0) throw std::invalid_argument("ratio21_limit_sample: v1 must be positive");
  if (v2 < 0.0 || v2 > v1) throw std::invalid_argument("ratio21_limit_sample: need 0 <= v2 <= v1");
  const double u = rng.next_open();
  const double ratio = v2 / v1;
  if (v2 > 0.0 && u < std::pow(ratio, 0.5 * alpha)) return ratio;
  return std::pow(u, 2.0 / alpha);
}

// Deterministic bound on the mass lost by truncating sum_i Gamma_i^{-2/alpha}
// at K terms (Gamma_i ~ i): K^{1-2/alpha}/(2/alpha - 1).
inline double trace_ratio_truncation_bias(double alpha, int truncation) {
  if (alpha <= 0.0 || alpha >= 2.0) {
    throw std::domain_error("trace_ratio_truncation_bias: alpha must be in (0,2)");
  }
  const double expo = 2.0 / alpha;
  return std::pow(static_cast<double>(truncation), 1.0 - expo) / (expo - 1.0);
}

// One draw of the largest-eigenvalue-to-trace limit
// (v1 / sum_j v_j) * Gamma_1^{-2/alpha} / sum_{i<=K} Gamma_i^{-2/alpha}.
inline double trace_ratio_limit_sample(double alpha, std::span<const double> v, int truncation,
                                       Rng& rng) {
  if (alpha <= 0.0 || alpha >= 2.0) {
    throw std::domain_error("trace_ratio_limit_sample: alpha must be in (0,2)");
  }
  if (truncation < 100) throw std::invalid_argument("trace_ratio_limit_sample: K must be >= 100");
  if (v.empty() || v.front() <= 0.0) {
    throw std::invalid_argument("trace_ratio_limit_sample: v1 must be positive");
  }
  double v_sum = 0.0;
  for (double vj : v) v_sum += vj;
  const GammaPoints g = gamma_points(static_cast<std::size_t>(truncation), rng);
  const double expo = -2.0 / alpha;
  double series = 0.0;
  for (double gi : g.values) series += std::pow(gi, expo);
  return (v.front() / v_sum) * std::pow(g.values.front(), expo) / series;
}

// Marcenko-Pastur density with ratio parameter gamma.
inline double mp_density(double gamma, double x) {
  if (gamma <= 0.0) throw std::invalid_argument("mp_density: gamma must be positive");
  const double sq = std::sqrt(gamma);
  const double a = (1.0 - sq) * (1.0 - sq);
  const double b = (1.0 + sq) * (1.0 + sq);
  if (x < a || x > b || x <= 0.0) return 0.0;
  return std::sqrt((b - x) * (x - a)) / (2.0 * std::numbers::pi * x * gamma);
}

// point mass at the origin for gamma > 1
inline double mp_point_mass(double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("mp_point_mass: gamma must be positive");
  return gamma > 1.0 ? 1.0 - 1.0 / gamma : 0.0;
}

struct NagaevResult {
  std::vector<double> x;
  std::vector<double> ratio;      // empirical P(S_n > x) / (n P(|Z| > x))
  double admissible_floor = 0.0;  // 5 * a_n
};

// Large-deviation ratio for sums of n iid draws; the limit for symmetric
// noise is p_+ = 1/2.  x values below 5 a_n are rejected (c_n/a_n -> infinity
// operationalized).
inline NagaevResult nagaev_ratio(const TailModel& model, std::size_t n,
                                 std::span<const double> x_grid, std::size_t replicates,
                                 std::uint64_t seed) {
  if (!model.heavy_tailed() || model.tail_index() >= 2.0) {
    throw std::domain_error("nagaev_ratio: need a heavy-tailed model with alpha in (0,2)");
  }
  if (n < 1 || replicates < 1) throw std::invalid_argument("nagaev_ratio: empty design");
  NagaevResult out;
  out.admissible_floor = 5.0 * normalizing_a(model, n);
  for (double x : x_grid) {
    if (x < out.admissible_floor) {
      throw std::invalid_argument("nagaev_ratio: x below the admissible range 5*a_n");
    }
  }
  out.x.assign(x_grid.begin(), x_grid.end());
  std::vector<std::size_t> hits(x_grid.size(), 0);
  for (std::size_t r = 0; r < replicates; ++r) {
    Rng rng(replicate_seed(seed, r));
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += model.draw(rng);
    for (std::size_t j = 0; j < x_grid.size(); ++j) {
      if (s > x_grid[j]) ++hits[j];
    }
  }
  out.ratio.resize(x_grid.size());
  for (std::size_t j = 0; j < x_grid.size(); ++j) {
    const double denom = static_cast<double>(n) * model.tail_prob(x_grid[j]);
    out.ratio[j] = (static_cast<double>(hits[j]) / static_cast<double>(replicates)) / denom;
  }
  return out;
}

// One realization of the first i_count * |tuples| points of the joint-lag
// limit process: row (i, j) is Gamma_i^{-2/alpha} * (v_j(0), ..., v_j(s)).
// Sharing one Gamma draw per i makes the correlation across lags exact.
inline std::vector<std::vector<double>> joint_limit_points(
    double alpha, const std::vector<std::vector<double>>& v_tuples, std::size_t i_count,
    Rng& rng) {
  if (v_tuples.empty()) throw std::invalid_argument("joint_limit_points: no scale tuples");
  const GammaPoints g = gamma_points(i_count, rng);
  std::vector<std::vector<double>> rows;
  rows.reserve(i_count * v_tuples.size());
  for (double gi : g.values) {
    const double factor = std::pow(gi, -2.0 / alpha);
    for (const std::vector<double>& tuple : v_tuples) {
      std::vector<double> row(tuple.size());
      for (std::size_t s = 0; s < tuple.size(); ++s) row[s] = factor * tuple[s];
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// N_n(x, infinity) for each threshold: how many normalized eigenvalues exceed x.
inline std::vector<double> pp_counts(std::span<const double> normalized_spectrum,
                                     std::span<const double> x_grid) {
  std::vector<double> counts(x_grid.size(), 0.0);
  for (std::size_t j = 0; j < x_grid.size(); ++j) {
    for (double lam : normalized_spectrum) {
      if (lam > x_grid[j]) counts[j] += 1.0;
    }
  }
  return counts;
}

// Mean measure of the limit point process: sum_j (x / v_j)^{-alpha/2}.
inline double pp_mean_measure(std::span<const double> v, double alpha, double x) {
  if (x <= 0.0) throw std::invalid_argument("pp_mean_measure: x must be positive");
  double s = 0.0;
  for (double vj : v) {
    if (vj > 0.0) s += std::pow(x / vj, -0.5 * alpha);
  }
  return s;
}

}  // namespace tailmat
