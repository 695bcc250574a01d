#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tailmat/estim.hpp"
#include "tailmat/linfield.hpp"

using namespace tailmat;

namespace {

ReturnsPanel panel_from_rows(const std::vector<std::vector<double>>& rows) {
  ReturnsPanel p;
  p.values = Matrix(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t t = 0; t < rows[0].size(); ++t) p.values(i, t) = rows[i][t];
  return p;
}

}  // namespace

TEST_CASE("hill estimator hand example") {
  const std::vector<double> sample = {8, 4, 2, 1};
  CHECK(hill(sample, 3) == doctest::Approx(1.0 / (2.0 * std::log(2.0))).epsilon(1e-12));
  CHECK(hill(sample, 3) == doctest::Approx(0.72135).epsilon(1e-4));
}

TEST_CASE("hill estimator is scale and order invariant") {
  Rng rng(70);
  std::vector<double> sample(200);
  for (double& v : sample) v = rng.next_open() * 10.0;
  std::vector<double> scaled = sample;
  for (double& v : scaled) v *= 37.5;
  CHECK(hill(sample, 20) == doctest::Approx(hill(scaled, 20)).epsilon(1e-12));
  std::vector<double> shuffled = sample;
  std::sort(shuffled.begin(), shuffled.end());
  CHECK(hill(sample, 20) == hill(shuffled, 20));
}

TEST_CASE("hill estimator preconditions") {
  const std::vector<double> tiny = {3.0, 2.0, 1.0};
  CHECK_THROWS_AS(hill(tiny, 3), std::invalid_argument);
  CHECK_THROWS_AS(hill(tiny, 1), std::invalid_argument);
  const std::vector<double> negative = {-1.0, -2.0, -3.0, -4.0, -5.0};
  CHECK_THROWS_AS(hill(negative, 2), std::invalid_argument);
}

TEST_CASE("tail pairs flag one-sided rows") {
  const ReturnsPanel panel = panel_from_rows({
      {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0},       // no losses
      {-1.0, 2.0, -3.0, 4.0, -5.0, 6.0, -7.0, 8.0},   // both sides
  });
  const std::vector<TailIndexPair> pairs = tail_pairs(panel, 2);
  CHECK(pairs[0].upper_ok);
  CHECK_FALSE(pairs[0].lower_ok);
  CHECK(pairs[1].upper_ok);
  CHECK(pairs[1].lower_ok);
  CHECK(pairs[1].alpha_lower > 0.0);
  CHECK(pairs[1].alpha_upper > 0.0);
}

TEST_CASE("rank transform hand example") {
  const ReturnsPanel panel = panel_from_rows({{0.5, 0.2, 0.9}});
  const Panel x = rank_transform(panel);
  CHECK(x.values(0, 0) == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-12));
  CHECK(x.values(0, 1) == doctest::Approx(1.0 / (2.0 * std::log(2.0))).epsilon(1e-12));
  CHECK(x.values(0, 2) == doctest::Approx(1.0 / std::log(4.0 / 3.0)).epsilon(1e-12));
  CHECK(x.values(0, 0) == doctest::Approx(1.4427).epsilon(1e-4));
  CHECK(x.values(0, 1) == doctest::Approx(0.7213).epsilon(1e-4));
  CHECK(x.values(0, 2) == doctest::Approx(3.4761).epsilon(1e-4));
}

TEST_CASE("rank transform is monotone and positive") {
  const ReturnsPanel panel = panel_from_rows({{-3.0, -1.0, 0.0, 2.0, 5.0, 9.0}});
  const Panel x = rank_transform(panel);
  for (std::size_t t = 0; t < 6; ++t) CHECK(x.values(0, t) > 0.0);
  for (std::size_t t = 1; t < 6; ++t) CHECK(x.values(0, t) > x.values(0, t - 1));
  CHECK_THROWS_AS(rank_transform(panel_from_rows({{1.0, 1.0, 1.0}})), std::invalid_argument);
}

TEST_CASE("rank transform depends only on within-row ranks") {
  const ReturnsPanel a = panel_from_rows({{0.1, 0.7, 0.3, 0.5}});
  ReturnsPanel b = a;
  for (std::size_t t = 0; t < 4; ++t) b.values(0, t) = std::exp(a.values(0, t)) * 100.0;
  const Panel xa = rank_transform(a);
  const Panel xb = rank_transform(b);
  for (std::size_t t = 0; t < 4; ++t) CHECK(xa.values(0, t) == xb.values(0, t));
}

TEST_CASE("rank transform rows are close to standard frechet") {
  // transformed row values are a fixed permutation of -1/log(r/(n+1)), so the
  // distance to Phi_1 is deterministic and about 1/(n+1)
  const std::size_t n = 1345;
  ReturnsPanel panel;
  panel.values = Matrix(1, n);
  Rng rng(71);
  for (std::size_t t = 0; t < n; ++t) panel.values(0, t) = rng.next_unit();
  const Panel x = rank_transform(panel);
  std::vector<double> row(x.values.row(0), x.values.row(0) + n);
  std::sort(row.begin(), row.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = std::exp(-1.0 / row[i]);  // Phi_1
    ks = std::max(ks, std::abs(f - static_cast<double>(i) / static_cast<double>(n)));
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / static_cast<double>(n) - f));
  }
  CHECK(ks < 0.05);
  CHECK(ks < 0.01);  // in fact about 1/(n+1)
}

TEST_CASE("eigen ratio report bands shrink toward zero") {
  FieldSpec spec;
  spec.noise = TailModel::pareto(1.6);
  spec.p = 12;
  spec.n = 60;
  spec.seed = 8;
  const FieldResult sim = simulate_field(spec);
  const std::vector<EigenRatioRow> rows = eigen_ratio_report(sim.x[0], 10, 2.0);
  REQUIRE(rows.size() == 10);
  for (const EigenRatioRow& row : rows) {
    CHECK(row.observed_log_ratio <= 0.0);
    CHECK(row.band_low < row.band_median);
    CHECK(row.band_median < row.band_high);
  }
  // median band -> 0 as i grows
  CHECK(std::abs(rows[9].band_median) < std::abs(rows[0].band_median));
  CHECK(rows[9].band_median == doctest::Approx(2.0 / (10 * 2.0) * std::log(0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(eigen_ratio_report(sim.x[0], 12, 2.0), std::invalid_argument);
}

TEST_CASE("lamyao report basics") {
  FieldSpec spec;
  spec.coeffs = CoeffMatrix::separable({1.0}, {1.0, 0.5});
  spec.noise = TailModel::pareto(1.2);
  spec.p = 6;
  spec.n = 40;
  spec.s_max = 3;
  spec.seed = 12;
  const FieldResult sim = simulate_field(spec);
  const std::vector<LamYaoRow> rows = lamyao_report(sim.x);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].ratio == doctest::Approx(1.0).epsilon(1e-12));
  for (const LamYaoRow& row : rows) {
    CHECK(row.ratio > 0.0);
    CHECK(row.ratio <= 1.0 + 1e-12);
  }
}
