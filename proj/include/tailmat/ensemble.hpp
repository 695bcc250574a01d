#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "tailmat/approx.hpp"
#include "tailmat/limits.hpp"
#include "tailmat/linfield.hpp"
#include "tailmat/spectra.hpp"
#include "tailmat/tracy_widom.hpp"

namespace tailmat {

// Runs fn(replicate_seed) for each replicate on a small worker pool.
// Replicate r gets seed base_seed ^ r; results land in slot r, so the
// outcome does not depend on scheduling.  Throwing replicates leave their
// slot empty.
template <class T>
std::vector<std::optional<T>> run_replicates(std::size_t count, std::uint64_t base_seed,
                                             unsigned workers,
                                             const std::function<T(std::uint64_t)>& fn) {
  std::vector<std::optional<T>> results(count);
  if (count == 0) return results;
  workers = std::max(1u, std::min<unsigned>(workers, std::thread::hardware_concurrency()));
  workers = std::min<unsigned>(workers, static_cast<unsigned>(count));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= count) return;
      try {
        results[r] = fn(replicate_seed(base_seed, r));
      } catch (...) {
        // recorded as a missing slot
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return results;
}

enum class StatisticKind {
  largest_normalized,        // lambda_(1) / a_np^2
  kth_normalized,            // lambda_(k) / a_np^2
  self_gap,                  // (lambda_(1)-lambda_(2))/lambda_(1)
  ratio21,                   // lambda_(2)/lambda_(1)
  ratio21_pow_alpha_half,    // (lambda_(2)/lambda_(1))^{alpha/2}
  trace_ratio,               // lambda_(1)/sum_i lambda_i
  top1_minus_rowmax,         // a_np^{-2} (lambda_(1) - D_(1)^>)
  top1_minus_z2max,          // a_np^{-2} (lambda_(1) - Z^2_(1))
  sup_error_delta,           // normalized sup_i |lambda_(i) - delta_(i)|
  sup_error_row,             // ... gamma^> version
  sup_error_col,             // ... gamma^v version
  tw_normalized,             // light-tailed Tracy-Widom scaling of lambda_(1)
};

struct EnsembleSpec {
  std::size_t replicates = 1;
  std::uint64_t base_seed = 0;
  FieldSpec field;
  StatisticKind statistic = StatisticKind::largest_normalized;
  int k = 1;       // for kth_normalized
  int power = 1;   // for the sup_error statistics
  unsigned workers = 1;
};

struct EnsembleSummary {
  std::vector<double> values;  // successful replicates, in replicate order
  std::vector<double> sorted;  // ascending
  std::size_t failures = 0;
  std::size_t replicates = 0;

  double ecdf(double x) const {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
  }
};

namespace detail {

struct StatisticContext {
  double a_np2 = 0.0;
  double alpha = 0.0;
  std::vector<double> v0;  // singular values of M(0)
};

inline StatisticContext make_context(const EnsembleSpec& spec) {
  StatisticContext ctx;
  ctx.alpha = spec.field.noise.tail_index();
  if (spec.field.noise.heavy_tailed()) {
    const double a = normalizing_a(spec.field.noise,
                                   static_cast<std::uint64_t>(spec.field.p) * spec.field.n);
    ctx.a_np2 = a * a;
  }
  if (!spec.field.coeff_hook) {
    ctx.v0 = m_matrix(spec.field.coeffs, 0).singular;
  }
  return ctx;
}

inline double evaluate_statistic(const EnsembleSpec& spec, const StatisticContext& ctx,
                                 std::uint64_t rep_seed) {
  FieldSpec field = spec.field;
  field.seed = rep_seed;
  const FieldResult sim = simulate_field(field);
  const SpectrumResult eigs = covariance_eigs(sim.x[0], ctx.a_np2);
  const std::vector<double>& lam = eigs.values;

  switch (spec.statistic) {
    case StatisticKind::largest_normalized:
      return lam.front() / ctx.a_np2;
    case StatisticKind::kth_normalized:
      return lam.at(static_cast<std::size_t>(spec.k - 1)) / ctx.a_np2;
    case StatisticKind::self_gap:
      return (lam[0] - lam[1]) / lam[0];
    case StatisticKind::ratio21:
      return lam[1] / lam[0];
    case StatisticKind::ratio21_pow_alpha_half:
      return std::pow(lam[1] / lam[0], 0.5 * ctx.alpha);
    case StatisticKind::trace_ratio: {
      double trace = 0.0;
      for (double v : lam) trace += v;
      return lam[0] / trace;
    }
    case StatisticKind::top1_minus_rowmax: {
      const OrderStats stats = order_stats(sim.z_core);
      const double d1 = stats.row_sums_desc.front();
      const double v1 = ctx.v0.front();
      return (lam[0] - d1 * v1) / ctx.a_np2;
    }
    case StatisticKind::top1_minus_z2max: {
      const OrderStats stats = order_stats(sim.z_core);
      const double v1 = ctx.v0.front();
      return (lam[0] - stats.z2_desc.front() * v1) / ctx.a_np2;
    }
    case StatisticKind::sup_error_delta:
    case StatisticKind::sup_error_row:
    case StatisticKind::sup_error_col: {
      const OrderStats stats = order_stats(sim.z_core);
      const ApproxKind kind = spec.statistic == StatisticKind::sup_error_delta
                                  ? ApproxKind::delta
                                  : (spec.statistic == StatisticKind::sup_error_row
                                         ? ApproxKind::gamma_right
                                         : ApproxKind::gamma_down);
      const ApproxSet set = approx_set(stats, ctx.v0, kind, lam.size());
      return sup_error(eigs, set, ctx.a_np2, spec.power).sup;
    }
    case StatisticKind::tw_normalized:
      return tw_normalized_statistic(lam.front(), field.p, field.n);
  }
  throw std::logic_error("evaluate_statistic: unknown statistic");
}

}  // namespace detail

// Monte Carlo ensemble of one scalar statistic.  Fails when more than 1% of
// the replicates fail.
inline EnsembleSummary run_ensemble(const EnsembleSpec& spec) {
  if (spec.replicates < 1) throw std::invalid_argument("run_ensemble: need replicates >= 1");
  const detail::StatisticContext ctx = detail::make_context(spec);
  const std::function<double(std::uint64_t)> fn = [&](std::uint64_t seed) {
    return detail::evaluate_statistic(spec, ctx, seed);
  };
  const std::vector<std::optional<double>> raw =
      run_replicates<double>(spec.replicates, spec.base_seed, spec.workers, fn);

  EnsembleSummary summary;
  summary.replicates = spec.replicates;
  for (const std::optional<double>& v : raw) {
    if (v) {
      summary.values.push_back(*v);
    } else {
      ++summary.failures;
    }
  }
  if (summary.failures * 100 > spec.replicates) {
    throw std::runtime_error("run_ensemble: more than 1% of replicates failed");
  }
  summary.sorted = summary.values;
  std::sort(summary.sorted.begin(), summary.sorted.end());
  return summary;
}

// Two-sided Kolmogorov-Smirnov distance between samples and a CDF.
inline double ks_distance(std::span<const double> samples,
                          const std::function<double(double)>& cdf) {
  if (samples.size() < 2) throw std::invalid_argument("ks_distance: need at least 2 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / m));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / m - f));
  }
  return d;
}

// Fraction of samples within +-epsilon of the atom location.
inline double atom_mass(std::span<const double> samples, double location, double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("atom_mass: epsilon must be positive");
  if (samples.empty()) return 0.0;
  std::size_t hits = 0;
  for (double v : samples) {
    if (std::abs(v - location) <= epsilon) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

struct Histogram {
  double lo = 0.0;
  double width = 0.0;
  std::vector<double> mass;  // sums to 1
};

// Freedman-Diaconis binning with an optional bin-count override.
inline Histogram histogram_fd(std::span<const double> samples, std::size_t bins_override = 0) {
  if (samples.size() < 2) throw std::invalid_argument("histogram_fd: need at least 2 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front(), hi = sorted.back();
  std::size_t bins = bins_override;
  if (bins == 0) {
    const double q1 = sorted[sorted.size() / 4];
    const double q3 = sorted[(3 * sorted.size()) / 4];
    const double iqr = q3 - q1;
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
    bins = width > 0.0 ? static_cast<std::size_t>(std::ceil((hi - lo) / width)) : 1;
    bins = std::clamp<std::size_t>(bins, 1, 100000);
  }
  Histogram h;
  h.lo = lo;
  h.width = (hi - lo) / static_cast<double>(bins);
  if (h.width == 0.0) h.width = 1.0;
  h.mass.assign(bins, 0.0);
  const double unit = 1.0 / static_cast<double>(sorted.size());
  for (double v : sorted) {
    std::size_t b = static_cast<std::size_t>((v - lo) / h.width);
    if (b >= bins) b = bins - 1;
    h.mass[b] += unit;
  }
  return h;
}

// Gaussian kernel density on an evaluation grid, Silverman bandwidth.
inline std::vector<std::pair<double, double>> kde_curve(std::span<const double> samples,
                                                        std::size_t points = 200) {
  if (samples.size() < 2) throw std::invalid_argument("kde_curve: need at least 2 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double mean = 0.0;
  for (double v : sorted) mean += v;
  mean /= m;
  double var = 0.0;
  for (double v : sorted) var += (v - mean) * (v - mean);
  var /= (m - 1.0);
  const double iqr = sorted[(3 * sorted.size()) / 4] - sorted[sorted.size() / 4];
  double spread = std::min(std::sqrt(var), iqr / 1.34);
  if (spread <= 0.0) spread = std::max(std::sqrt(var), 1e-12);
  const double bw = 0.9 * spread * std::pow(m, -0.2);

  const double lo = sorted.front() - 3.0 * bw;
  const double hi = sorted.back() + 3.0 * bw;
  std::vector<std::pair<double, double>> curve(points);
  const double norm = 1.0 / (m * bw * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t g = 0; g < points; ++g) {
    const double x = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(points - 1);
    double dens = 0.0;
    for (double v : sorted) {
      const double z = (x - v) / bw;
      dens += std::exp(-0.5 * z * z);
    }
    curve[g] = {x, dens * norm};
  }
  return curve;
}

struct PpCountSummary {
  std::vector<double> x;
  std::vector<double> mean_counts;  // ensemble mean of N_n(x, infinity)
  std::vector<double> limit;        // sum_j (x/v_j)^{-alpha/2}
};

// Ensemble mean of the exceedance counts of the normalized spectrum against
// the Poisson mean measure of the limit process.
inline PpCountSummary pp_count_ensemble(const FieldSpec& field, std::span<const double> x_grid,
                                        std::size_t replicates, std::uint64_t base_seed,
                                        unsigned workers = 1) {
  const double alpha = field.noise.tail_index();
  const double a = normalizing_a(field.noise, static_cast<std::uint64_t>(field.p) * field.n);
  const double a2 = a * a;
  const std::vector<double> v = m_matrix(field.coeffs, 0).singular;

  const std::function<std::vector<double>(std::uint64_t)> fn = [&](std::uint64_t seed) {
    FieldSpec f = field;
    f.seed = seed;
    const FieldResult sim = simulate_field(f);
    std::vector<double> lam = covariance_eigs(sim.x[0], a2).values;
    for (double& v_ : lam) v_ /= a2;
    return pp_counts(lam, x_grid);
  };
  const auto raw = run_replicates<std::vector<double>>(replicates, base_seed, workers, fn);

  PpCountSummary out;
  out.x.assign(x_grid.begin(), x_grid.end());
  out.mean_counts.assign(x_grid.size(), 0.0);
  std::size_t ok = 0;
  for (const auto& counts : raw) {
    if (!counts) continue;
    ++ok;
    for (std::size_t j = 0; j < x_grid.size(); ++j) out.mean_counts[j] += (*counts)[j];
  }
  if (ok == 0) throw std::runtime_error("pp_count_ensemble: all replicates failed");
  for (double& c : out.mean_counts) c /= static_cast<double>(ok);
  out.limit.resize(x_grid.size());
  for (std::size_t j = 0; j < x_grid.size(); ++j) {
    out.limit[j] = pp_mean_measure(v, alpha, x_grid[j]);
  }
  return out;
}

}  // namespace tailmat
