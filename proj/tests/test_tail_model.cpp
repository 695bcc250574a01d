#include <doctest.h>

#include <cmath>
#include <vector>

#include "tailmat/tail_model.hpp"

using namespace tailmat;

namespace {

// analytic CDF of the symmetric Pareto-type law, derived by hand from the
// density: used as the independent sampling oracle
double pareto_cdf(double alpha, double x) {
  if (x <= -0.25) return 0.25 * std::pow(-4.0 * x, -alpha);
  if (x <= 0.25) return 0.25 + (x + 0.25);
  return 1.0 - 0.25 * std::pow(4.0 * x, -alpha);
}

}  // namespace

TEST_CASE("pareto density integrates to one") {
  // central block is exactly 1/2; each tail integrated on a log grid chosen
  // so the truncated mass is below 1e-16 (start just past the branch point)
  for (double alpha : {0.6, 1.6, 2.5}) {
    const TailModel m = TailModel::pareto(alpha);
    const double y_lo = std::log(0.25) + 4e-10;
    const double y_hi = 16.0 * std::log(10.0) / alpha - std::log(4.0);
    const int steps = 40000;  // Simpson on x = e^y
    const double h = (y_hi - y_lo) / steps;
    double tail = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double y = y_lo + i * h;
      const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      tail += w * m.density(std::exp(y)) * std::exp(y);
    }
    tail *= h / 3.0;
    CHECK(std::abs(0.5 + 2.0 * tail - 1.0) < 1e-9);
  }
}

TEST_CASE("pareto tail probability closed form") {
  const TailModel m = TailModel::pareto(1.6);
  CHECK(m.tail_prob(0.25) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.tail_prob(1.0) == doctest::Approx(0.5 * std::pow(4.0, -1.6)).epsilon(1e-12));
  // nonincreasing in x
  double prev = 1.0;
  for (double x = 0.01; x < 50.0; x *= 1.7) {
    const double t = m.tail_prob(x);
    CHECK(t <= prev + 1e-15);
    prev = t;
  }
  CHECK_THROWS_AS(TailModel::three_point().tail_prob(1.0), std::domain_error);
  CHECK_THROWS_AS(TailModel::standard_normal().tail_prob(1.0), std::domain_error);
}

TEST_CASE("student t tail via quadrature") {
  const TailModel t = TailModel::student_t(1.0);
  // t_1 is standard Cauchy: P(|T| > x) = 1 - (2/pi) atan(x)
  for (double x : {0.5, 1.0, 3.0, 20.0}) {
    const double expected = 1.0 - 2.0 / std::numbers::pi * std::atan(x);
    CHECK(t.tail_prob(x) == doctest::Approx(expected).epsilon(1e-9));
  }
  // t_2 has closed form P(|T| > x) = 1 - x/sqrt(2 + x^2)
  const TailModel t2 = TailModel::student_t(2.0);
  for (double x : {0.3, 1.0, 5.0}) {
    const double expected = 1.0 - x / std::sqrt(2.0 + x * x);
    CHECK(t2.tail_prob(x) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("normalizing sequence") {
  const TailModel m = TailModel::pareto(1.6);
  CHECK(normalizing_a(m, 2) == doctest::Approx(0.25).epsilon(1e-14));
  // independent bisection oracle on tail_prob
  const std::uint64_t k = 200000;
  double lo = 0.25, hi = 1.0;
  while (m.tail_prob(hi) > 1.0 / static_cast<double>(k)) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (m.tail_prob(mid) > 1.0 / static_cast<double>(k) ? lo : hi) = mid;
  }
  CHECK(normalizing_a(m, k) == doctest::Approx(lo).epsilon(1e-8));
  CHECK(normalizing_a(m, k) == doctest::Approx(333.38).epsilon(1e-3));

  // defining equation and monotone growth
  double prev = 0.0;
  for (std::uint64_t kk : {2ull, 10ull, 1000ull, 100000ull, 10000000ull}) {
    const double a = normalizing_a(m, kk);
    CHECK(m.tail_prob(a) * static_cast<double>(kk) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(a > prev);
    prev = a;
  }

  // bisection path for the t model satisfies the defining equation too
  const TailModel t = TailModel::student_t(1.5);
  const double at = normalizing_a(t, 10000);
  CHECK(t.tail_prob(at) * 10000.0 == doctest::Approx(1.0).epsilon(1e-6));

  CHECK_THROWS_AS(normalizing_a(TailModel::standard_normal(), 10), std::domain_error);
}

TEST_CASE("three point moments") {
  const TailModel m = TailModel::three_point();
  const std::vector<double> draws = m.sample(1000000, 20240427);
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  for (double v : draws) {
    m1 += v;
    m2 += v * v;
    m3 += v * v * v;
    m4 += v * v * v * v;
  }
  const double n = static_cast<double>(draws.size());
  m1 /= n;
  m2 /= n;
  m3 /= n;
  m4 /= n;
  // 3 standard errors of each empirical moment
  CHECK(std::abs(m1 - 0.0) < 3.0 * std::sqrt(1.0 / n));
  CHECK(std::abs(m2 - 1.0) < 3.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(m3 - 0.0) < 3.0 * std::sqrt(9.0 / n));
  CHECK(std::abs(m4 - 3.0) < 3.0 * std::sqrt(18.0 / n));
}

TEST_CASE("normal sample mean") {
  const TailModel m = TailModel::standard_normal();
  const std::vector<double> draws = m.sample(1000000, 7);
  double mean = 0.0;
  for (double v : draws) mean += v;
  mean /= static_cast<double>(draws.size());
  CHECK(std::abs(mean) < 0.004);
}

TEST_CASE("pareto exceedance fraction") {
  const TailModel m = TailModel::pareto(1.6);
  const std::vector<double> draws = m.sample(1000000, 99);
  std::size_t hits = 0;
  for (double v : draws) {
    if (std::abs(v) > 1.0) ++hits;
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(draws.size());
  CHECK(std::abs(frac - 0.5 * std::pow(4.0, -1.6)) < 0.001);
}

TEST_CASE("inverse cdf sampling matches the analytic cdf") {
  const double alpha = 1.6;
  const TailModel m = TailModel::pareto(alpha);
  std::vector<double> draws = m.sample(100000, 31337);
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double f = pareto_cdf(alpha, draws[i]);
    ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - f));
  }
  CHECK(ks < 0.01);
}

TEST_CASE("deterministic replay") {
  const TailModel m = TailModel::student_t(1.5);
  const std::vector<double> a = m.sample(5000, 123);
  const std::vector<double> b = m.sample(5000, 123);
  CHECK(a == b);
  const std::vector<double> c = m.sample(5000, 124);
  CHECK(a != c);
}

TEST_CASE("sample preconditions") {
  CHECK_THROWS_AS(TailModel::pareto(0.0), std::invalid_argument);
  CHECK_THROWS_AS(TailModel::pareto(1.0).sample(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(TailModel::pareto(1.0).tail_prob(0.0), std::invalid_argument);
}
