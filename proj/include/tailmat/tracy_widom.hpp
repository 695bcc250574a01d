#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "tailmat/airy.hpp"

namespace tailmat {

// Hastings-McLeod solution of q'' = x q + 2 q^3 on a uniform grid
// x0 > x0 - h > ... > x_min, stored together with q'.
struct PainleveGrid {
  double x0 = 8.0;
  double h = 2.5e-4;
  std::vector<double> q;   // q[j] at x = x0 - j h
  std::vector<double> qp;  // q'

  double x_min() const { return x0 - h * static_cast<double>(q.size() - 1); }
  double x_at(std::size_t j) const { return x0 - h * static_cast<double>(j); }
};

// Shooting from the q(x) ~ Ai(x) boundary data at x0 with the classical
// fourth-order one-step method, integrating leftward.
inline PainleveGrid solve_painleve(double x0 = 8.0, double x_min = -8.0, double h = 2.5e-4) {
  if (x0 < 6.0) throw std::invalid_argument("solve_painleve: x0 must be >= 6");
  if (h <= 0.0 || x_min >= x0) throw std::invalid_argument("solve_painleve: bad grid");

  const std::size_t steps = static_cast<std::size_t>(std::ceil((x0 - x_min) / h - 1e-9));
  PainleveGrid grid;
  grid.x0 = x0;
  grid.h = h;
  grid.q.resize(steps + 1);
  grid.qp.resize(steps + 1);
  double q = airy_ai(x0);
  double r = airy_ai_prime(x0);
  grid.q[0] = q;
  grid.qp[0] = r;

  auto fq = [](double r_) { return r_; };
  auto fr = [](double x_, double q_) { return x_ * q_ + 2.0 * q_ * q_ * q_; };

  for (std::size_t j = 0; j < steps; ++j) {
    const double x = grid.x_at(j);
    const double k1q = fq(r), k1r = fr(x, q);
    const double k2q = fq(r - 0.5 * h * k1r), k2r = fr(x - 0.5 * h, q - 0.5 * h * k1q);
    const double k3q = fq(r - 0.5 * h * k2r), k3r = fr(x - 0.5 * h, q - 0.5 * h * k2q);
    const double k4q = fq(r - h * k3r), k4r = fr(x - h, q - h * k3q);
    q -= h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    r -= h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
    if (!(std::abs(q) < 1e3)) {
      throw std::runtime_error("solve_painleve: solution blew up (boundary-condition drift)");
    }
    grid.q[j + 1] = q;
    grid.qp[j + 1] = r;
  }
  return grid;
}

// F1(s) = exp(-1/2 int_s^inf [q(x) + (x-s) q(x)^2] dx), evaluated from cached
// prefix integrals of q, q^2 and x q^2 over the solved grid plus a first-order
// Airy tail correction beyond x0.
class TracyWidomF1 {
 public:
  explicit TracyWidomF1(PainleveGrid grid) : grid_(std::move(grid)) {
    const std::size_t N = grid_.q.size();
    iq_.resize(N, 0.0);
    iq2_.resize(N, 0.0);
    ixq2_.resize(N, 0.0);
    // cumulative integral from x0 down to x_j; |h| cell steps with a
    // three-point (locally quadratic) rule keeps the global error O(h^3)
    for (std::size_t j = 1; j < N; ++j) {
      const std::size_t a = j >= 2 ? j - 2 : 0;
      const std::size_t b = j - 1;
      const std::size_t c = j;
      iq_[j] = iq_[j - 1] + cell(a, b, c, [&](std::size_t m) { return grid_.q[m]; }, j);
      iq2_[j] = iq2_[j - 1] + cell(a, b, c, [&](std::size_t m) { return grid_.q[m] * grid_.q[m]; }, j);
      ixq2_[j] = ixq2_[j - 1] +
                 cell(a, b, c, [&](std::size_t m) { return grid_.x_at(m) * grid_.q[m] * grid_.q[m]; }, j);
    }
    // tail: q ~ Ai beyond x0, int_{x0}^inf Ai ~ Ai(x0)/sqrt(x0)
    tail_q_ = airy_ai(grid_.x0) / std::sqrt(grid_.x0);
    tail_q2_ = airy_ai(grid_.x0) * airy_ai(grid_.x0) / (2.0 * std::sqrt(grid_.x0));
  }

  const PainleveGrid& grid() const { return grid_; }

  double cdf(double s) const {
    if (s > grid_.x0 - 2.0 * grid_.h || s < grid_.x_min()) {
      throw std::invalid_argument("TracyWidomF1::cdf: s outside the solved grid");
    }
    // grid node at or right above s
    const double pos = (grid_.x0 - s) / grid_.h;
    std::size_t j = static_cast<std::size_t>(std::floor(pos + 1e-12));
    if (j >= grid_.q.size()) j = grid_.q.size() - 1;

    double integral = iq_[j] + (ixq2_[j] - s * iq2_[j]);
    integral += partial_cell(j, s);
    integral += tail_q_ + tail_q2_ * (grid_.x0 - s);
    return std::exp(-0.5 * integral);
  }

 private:
  template <class F>
  double cell(std::size_t a, std::size_t b, std::size_t c, F&& f, std::size_t j) const {
    // integral over [x_j, x_{j-1}] from the quadratic through three
    // neighbouring nodes; the first cell uses the (0,1,2) stencil
    const double fa = f(a), fb = f(b), fc = f(c);
    if (j == 1) {
      // stencil (j-1=0, j=1, j+1=2) mapped as forward rule
      const double f2 = f(std::min<std::size_t>(2, grid_.q.size() - 1));
      return grid_.h / 12.0 * (5.0 * fb + 8.0 * fc - f2);
    }
    return grid_.h / 12.0 * (-fa + 8.0 * fb + 5.0 * fc);
  }

  // exact-enough handling of the fraction of a cell between s and x_j, with
  // q cubic-Hermite interpolated from (q, q') at the surrounding nodes
  double partial_cell(std::size_t j, double s) const {
    const double xj = grid_.x_at(j);
    const double width = xj - s;
    if (width <= 0.0) return 0.0;
    const std::size_t jn = std::min(j + 1, grid_.q.size() - 1);
    const double x_lo = grid_.x_at(jn);
    auto q_at = [&](double x) {
      if (jn == j) return grid_.q[j];
      const double t = (x - x_lo) / (xj - x_lo);
      const double q0 = grid_.q[jn], q1 = grid_.q[j];
      const double m0 = grid_.qp[jn] * (xj - x_lo), m1 = grid_.qp[j] * (xj - x_lo);
      const double t2 = t * t, t3 = t2 * t;
      return (2.0 * t3 - 3.0 * t2 + 1.0) * q0 + (t3 - 2.0 * t2 + t) * m0 +
             (-2.0 * t3 + 3.0 * t2) * q1 + (t3 - t2) * m1;
    };
    // two-point Gauss on [s, x_j]
    const double mid = 0.5 * (s + xj);
    const double off = 0.5 * width / std::sqrt(3.0);
    double acc = 0.0;
    for (double x : {mid - off, mid + off}) {
      const double qv = q_at(x);
      acc += qv + (x - s) * qv * qv;
    }
    return 0.5 * width * acc;
  }

  PainleveGrid grid_;
  std::vector<double> iq_, iq2_, ixq2_;
  double tail_q_ = 0.0, tail_q2_ = 0.0;
};

// Normalization of the largest sample-covariance eigenvalue whose limit is
// the order-1 Tracy-Widom law for light-tailed panels:
// n^{2/3} gamma^{1/6} / (1+sqrt(gamma))^{4/3} * (lambda1/n - (1+sqrt(p/n))^2).
inline double tw_normalized_statistic(double lambda1, std::size_t p, std::size_t n) {
  const double gamma = static_cast<double>(p) / static_cast<double>(n);
  const double sq = std::sqrt(gamma);
  const double center = (1.0 + sq) * (1.0 + sq);
  const double scale = std::pow(static_cast<double>(n), 2.0 / 3.0) * std::pow(sq, 1.0 / 3.0) /
                       std::pow(1.0 + sq, 4.0 / 3.0);
  return scale * (lambda1 / static_cast<double>(n) - center);
}

}  // namespace tailmat
