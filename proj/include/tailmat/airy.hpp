#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tailmat {

namespace detail {

// Ai(0) = 3^{-2/3}/Gamma(2/3), -Ai'(0) = 3^{-1/3}/Gamma(1/3)
inline constexpr double kAiryC1 = 0.35502805388781723926;
inline constexpr double kAiryC2 = 0.25881940379280679841;

struct AirySeries {
  double f, fp, g, gp;
};

// Maclaurin sums f, g and their derivatives; terms added until the increment
// falls below 1e-16 relative.
inline AirySeries airy_series(double x) {
  const double x3 = x * x * x;
  AirySeries s;
  double tf = 1.0;      // f term:  x^{3k} / prod
  double tg = x;        // g term:  x^{3k+1} / prod
  s.f = tf;
  s.g = tg;
  s.fp = 0.0;           // f' = sum 3k a_k x^{3k-1}
  s.gp = 1.0;           // g' = sum (3k+1) b_k x^{3k}
  double scale = std::max({1.0, std::abs(tf), std::abs(tg)});
  for (int k = 1; k < 200; ++k) {
    tf *= x3 / (3.0 * k * (3.0 * k - 1.0));
    tg *= x3 / (3.0 * k * (3.0 * k + 1.0));
    s.f += tf;
    s.g += tg;
    if (x != 0.0) {
      s.fp += 3.0 * k * tf / x;
      s.gp += (3.0 * k + 1.0) * tg / x;
    }
    scale = std::max({scale, std::abs(tf), std::abs(tg)});
    if (std::abs(tf) < 1e-16 * scale && std::abs(tg) < 1e-16 * scale) break;
  }
  return s;
}

// u_k recurrence of the Airy asymptotic expansions
inline double airy_u_next(double u, int k) {
  return u * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / (216.0 * k * (2.0 * k - 1.0));
}

// e^{zeta}-scaled asymptotic sums for x > 0: Ai uses sum (-1)^k u_k zeta^{-k},
// Ai' uses v_k = (6k+1)/(1-6k) u_k.  Truncated at the smallest term.
inline void airy_asymptotic_sums(double zeta, double& sum_u, double& sum_v) {
  sum_u = 1.0;
  sum_v = 1.0;
  double u = 1.0;
  double prev = 1.0;
  double sign = 1.0;
  for (int k = 1; k < 60; ++k) {
    u = airy_u_next(u, k);
    const double term = u / std::pow(zeta, k);
    if (term >= prev) break;  // optimal truncation
    sign = -sign;
    sum_u += sign * term;
    sum_v += sign * term * (6.0 * k + 1.0) / (1.0 - 6.0 * k);
    prev = term;
    if (term < 1e-18) break;
  }
}

// oscillatory sums P (even u) and Q (odd u) for the x < 0 expansion
inline void airy_oscillatory_sums(double zeta, double& P, double& Q) {
  P = 1.0;
  Q = 0.0;
  double u = 1.0;
  double prev_term = 1.0;
  for (int k = 1; k < 60; ++k) {
    u = airy_u_next(u, k);
    const double term = u / std::pow(zeta, k);
    if (term >= prev_term) break;
    const int pair = k / 2;
    const double sign = (pair % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 1) {
      Q += sign * term;
    } else {
      P += sign * term;
    }
    prev_term = term;
    if (term < 1e-18) break;
  }
}

}  // namespace detail

// Airy function of the first kind for |x| <= 20: Maclaurin series on
// [-4.5, 4.5] (used down to -6), exponential asymptotic expansion above,
// oscillatory expansion below -6.
inline double airy_ai(double x) {
  if (std::abs(x) > 20.0) throw std::domain_error("airy_ai: |x| must be <= 20");
  if (x > 4.5) {
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    double su, sv;
    detail::airy_asymptotic_sums(zeta, su, sv);
    return std::exp(-zeta) / (2.0 * std::sqrt(std::numbers::pi) * std::pow(x, 0.25)) * su;
  }
  if (x >= -6.0) {
    const detail::AirySeries s = detail::airy_series(x);
    return detail::kAiryC1 * s.f - detail::kAiryC2 * s.g;
  }
  const double z = -x;
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  double P, Q;
  detail::airy_oscillatory_sums(zeta, P, Q);
  const double phase = zeta - 0.25 * std::numbers::pi;
  return (std::cos(phase) * P + std::sin(phase) * Q) /
         (std::sqrt(std::numbers::pi) * std::pow(z, 0.25));
}

// Derivative of Ai; needed for the Painleve initial data, domain [-6, 20].
inline double airy_ai_prime(double x) {
  if (x > 20.0 || x < -6.0) throw std::domain_error("airy_ai_prime: x must be in [-6, 20]");
  if (x > 4.5) {
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    double su, sv;
    detail::airy_asymptotic_sums(zeta, su, sv);
    return -std::pow(x, 0.25) * std::exp(-zeta) / (2.0 * std::sqrt(std::numbers::pi)) * sv;
  }
  const detail::AirySeries s = detail::airy_series(x);
  return detail::kAiryC1 * s.fp - detail::kAiryC2 * s.gp;
}

}  // namespace tailmat
