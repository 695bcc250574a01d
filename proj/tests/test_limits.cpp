#include <doctest.h>

#include <cmath>
#include <vector>

#include "tailmat/limits.hpp"

using namespace tailmat;

TEST_CASE("frechet cdf") {
  CHECK(frechet_cdf(0.8, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(frechet_cdf(0.8, 1e12) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(frechet_cdf(2.0, 1e-6) < 1e-12);
  CHECK_THROWS_AS(frechet_cdf(0.8, 0.0), std::invalid_argument);
}

TEST_CASE("kth largest cdf") {
  for (double x : {0.3, 1.0, 4.0}) {
    CHECK(kth_max_cdf(1, 1.6, x) == doctest::Approx(frechet_cdf(0.8, x)).epsilon(1e-14));
  }
  CHECK(kth_max_cdf(2, 2.0, 1.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
  // monotone in k: lambda_(k+1) <= lambda_(k), so its cdf dominates
  for (double x : {0.5, 1.0, 2.0, 5.0}) {
    for (int k = 1; k < 6; ++k) {
      CHECK(kth_max_cdf(k + 1, 1.6, x) >= kth_max_cdf(k, 1.6, x) - 1e-15);
    }
  }
  CHECK_THROWS_AS(kth_max_cdf(0, 1.6, 1.0), std::invalid_argument);
}

TEST_CASE("ratio law cdf and quantile") {
  CHECK(ratio_law_cdf(1, 2.0, 0.25) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(ratio_law_cdf(3, 1.0, 0.999999) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK_THROWS_AS(ratio_law_cdf(1, 2.0, 1.5), std::invalid_argument);
  // quantile inverse round-trips
  for (int i : {1, 2, 7}) {
    for (double q : {0.01, 0.5, 0.99}) {
      const double x = ratio_law_quantile(i, 2.3, q);
      CHECK(ratio_law_cdf(i, 2.3, x) == doctest::Approx(q).epsilon(1e-12));
    }
  }
}

TEST_CASE("spectral gap limit law") {
  const GapLaw law = gap_limit(1.5, 8.0, 2.0);
  CHECK(law.atom_location == doctest::Approx(0.75));
  CHECK(law.atom_mass == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-14));
  CHECK(law.atom_mass == doctest::Approx(0.35355).epsilon(1e-4));
  // total mass: continuous part just below the atom plus the atom mass
  const double below = law.cdf(law.atom_location - 1e-13);
  CHECK(below + law.atom_mass == doctest::Approx(1.0).epsilon(1e-12));
  // right-continuous, equal to one at the atom
  CHECK(law.cdf(law.atom_location) == 1.0);
  CHECK(law.cdf(-0.1) == 0.0);
  CHECK(law.cdf(0.5) == doctest::Approx(1.0 - std::pow(0.5, 0.75)).epsilon(1e-14));

  const GapLaw iid = gap_limit(0.6, 1.0, 0.0);
  CHECK(iid.atom_mass == 0.0);
  CHECK(iid.atom_location == doctest::Approx(1.0));
  CHECK(iid.cdf(0.3) == doctest::Approx(1.0 - std::pow(0.7, 0.3)).epsilon(1e-14));

  CHECK_THROWS_AS(gap_limit(1.0, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("ratio21 sampler hits the atom with the right mass") {
  Rng rng(55);
  const double alpha = 1.5;
  std::size_t atom_hits = 0;
  const std::size_t draws = 100000;
  for (std::size_t i = 0; i < draws; ++i) {
    const double v = ratio21_limit_sample(alpha, 8.0, 2.0, rng);
    CHECK(v >= 0.25);
    CHECK(v < 1.0);
    if (v == 0.25) ++atom_hits;
  }
  const double mass = static_cast<double>(atom_hits) / static_cast<double>(draws);
  CHECK(std::abs(mass - std::pow(2.0, -alpha)) < 0.005);

  // v2 = 0 reduces to the law of U^{2/alpha}
  Rng r2(56);
  for (int i = 0; i < 1000; ++i) {
    const double v = ratio21_limit_sample(2.0, 3.0, 0.0, r2);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("trace ratio sampler stays within its support") {
  Rng rng(57);
  const std::vector<double> v = {8.0, 2.0};
  for (int i = 0; i < 500; ++i) {
    const double draw = trace_ratio_limit_sample(1.6, v, 200, rng);
    CHECK(draw > 0.0);
    CHECK(draw <= 0.8 + 1e-12);  // v1/(v1+v2) = 4/5
  }
  const std::vector<double> rank1 = {3.0};
  for (int i = 0; i < 200; ++i) {
    const double draw = trace_ratio_limit_sample(1.6, rank1, 200, rng);
    CHECK(draw <= 1.0);
  }
  CHECK_THROWS_AS(trace_ratio_limit_sample(2.5, v, 200, rng), std::domain_error);
  CHECK_THROWS_AS(trace_ratio_limit_sample(1.6, v, 50, rng), std::invalid_argument);
  // truncation bias bound decreases in K
  CHECK(trace_ratio_truncation_bias(1.6, 10000) < trace_ratio_truncation_bias(1.6, 100));
  CHECK(trace_ratio_truncation_bias(1.6, 10000) ==
        doctest::Approx(std::pow(10000.0, -0.25) / 0.25).epsilon(1e-12));
}

TEST_CASE("marcenko-pastur density") {
  CHECK(mp_density(1.0, 2.0) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-12));
  CHECK(mp_density(0.5, 0.01) == 0.0);
  CHECK(mp_density(0.5, 10.0) == 0.0);
  // integral equals min(1, 1/gamma); substitution x = mid + r sin(t) removes
  // the sqrt edge singularities (tiny inset at -pi/2 avoids x = 0 for gamma=1)
  for (double gamma : {0.5, 1.0, 2.0}) {
    const double sq = std::sqrt(gamma);
    const double a = (1.0 - sq) * (1.0 - sq), b = (1.0 + sq) * (1.0 + sq);
    const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
    const int steps = 4000;
    const double t_lo = -0.5 * std::numbers::pi + 1e-7;
    const double t_hi = 0.5 * std::numbers::pi;
    double integral = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double t = t_lo + (t_hi - t_lo) * i / steps;
      const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      integral += w * mp_density(gamma, mid + rad * std::sin(t)) * rad * std::cos(t);
    }
    integral *= (t_hi - t_lo) / steps / 3.0;
    CHECK(std::abs(integral - std::min(1.0, 1.0 / gamma)) < 1e-6);
    CHECK(mp_point_mass(gamma) == doctest::Approx(gamma > 1 ? 1.0 - 1.0 / gamma : 0.0));
  }
}

TEST_CASE("gamma points are increasing") {
  Rng rng(60);
  const GammaPoints g = gamma_points(50, rng);
  CHECK(g.values.front() > 0.0);
  for (std::size_t i = 1; i < g.values.size(); ++i) CHECK(g.values[i] > g.values[i - 1]);
}

TEST_CASE("nagaev ratio rejects inadmissible thresholds") {
  const TailModel m = TailModel::pareto(1.6);
  const double a_n = normalizing_a(m, 1000);
  const std::vector<double> bad = {a_n};
  CHECK_THROWS_AS(nagaev_ratio(m, 1000, bad, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(nagaev_ratio(TailModel::pareto(2.5), 1000, bad, 10, 1), std::domain_error);
}

TEST_CASE("joint limit points share one gamma factor per row group") {
  Rng rng(61);
  const std::vector<std::vector<double>> tuples = {{8.0, 5.0}, {2.0, 0.0}};
  const auto rows = joint_limit_points(1.6, tuples, 4, rng);
  REQUIRE(rows.size() == 8);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& first = rows[2 * i];
    const auto& second = rows[2 * i + 1];
    const double factor = first[0] / 8.0;
    CHECK(first[1] == doctest::Approx(factor * 5.0).epsilon(1e-12));
    CHECK(second[0] == doctest::Approx(factor * 2.0).epsilon(1e-12));
    CHECK(second[1] == 0.0);
    if (i > 0) CHECK(factor < rows[2 * (i - 1)][0] / 8.0);  // Gamma_i increases
  }
  CHECK_THROWS_AS(joint_limit_points(1.6, {}, 3, rng), std::invalid_argument);
}

TEST_CASE("point process counts") {
  const std::vector<double> spectrum = {9.0, 3.5, 1.2, 0.2};
  const std::vector<double> grid = {1.0, 4.0, 100.0};
  const std::vector<double> counts = pp_counts(spectrum, grid);
  CHECK(counts[0] == 3.0);
  CHECK(counts[1] == 1.0);
  CHECK(counts[2] == 0.0);

  const std::vector<double> v = {8.0, 2.0};
  CHECK(pp_mean_measure(v, 0.6, 2.0) ==
        doctest::Approx(std::pow(0.25, -0.3) + 1.0).epsilon(1e-12));
  const std::vector<double> iid = {1.0};
  CHECK(pp_mean_measure(iid, 1.6, 4.0) == doctest::Approx(std::pow(4.0, -0.8)).epsilon(1e-12));
}
