#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailmat/rng.hpp"

namespace tailmat {

namespace detail {

// tanh-sinh quadrature on [a,b] for integrands smooth on the closed interval.
template <class F>
double tanh_sinh(F&& f, double a, double b, double tol = 1e-12) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double pi_half = 0.5 * std::numbers::pi;

  // sum of w_k * f(x_k) over nodes t = k*h; step 2 with start 1 visits the
  // nodes newly introduced when h is halved
  auto node_sum = [&](double h, int k_start, int k_step) {
    double s = 0.0;
    for (int k = k_start;; k += k_step) {
      const double t = k * h;
      if (t > 3.5) break;
      const double sh = pi_half * std::sinh(t);
      const double ch = std::cosh(sh);
      const double w = pi_half * std::cosh(t) / (ch * ch);
      if (w < 1e-17) break;
      const double u = std::tanh(sh);
      double v = f(mid + half * u);
      if (k > 0) v += f(mid - half * u);
      s += w * v;
    }
    return s;
  };

  double h = 1.0;
  double sum = node_sum(h, 0, 1);
  double result = half * h * sum;
  for (int level = 0; level < 9; ++level) {
    h *= 0.5;
    sum += node_sum(h, 1, 2);
    const double next = half * h * sum;
    if (level > 1 && std::abs(next - result) < tol * (1.0 + std::abs(next))) {
      return next;
    }
    result = next;
  }
  return result;
}

}  // namespace detail

enum class NoiseKind { pareto_symmetric, student_t, three_point, standard_normal };

// Noise distribution with a regularly varying tail (or a light-tailed
// baseline).  The symmetric Pareto-type law has density 1 on |x| <= 1/4 and
// alpha/(4|x|)^(alpha+1) outside, hence P(|Z|>x) = (4x)^(-alpha)/2 for
// x >= 1/4 and the exact normalizer a_k = (k/2)^(1/alpha)/4.
class TailModel {
 public:
  static TailModel pareto(double alpha) {
    require(alpha > 0, "pareto tail index must be positive");
    return TailModel(NoiseKind::pareto_symmetric, alpha);
  }
  static TailModel student_t(double dof) {
    require(dof > 0, "t degrees of freedom must be positive");
    return TailModel(NoiseKind::student_t, dof);
  }
  static TailModel three_point() { return TailModel(NoiseKind::three_point, 0); }
  static TailModel standard_normal() { return TailModel(NoiseKind::standard_normal, 0); }

  NoiseKind kind() const { return kind_; }

  bool heavy_tailed() const {
    return kind_ == NoiseKind::pareto_symmetric || kind_ == NoiseKind::student_t;
  }

  // regular-variation index; +inf for the light-tailed variants
  double tail_index() const {
    if (!heavy_tailed()) return std::numeric_limits<double>::infinity();
    return param_;
  }

  double draw(Rng& rng) const {
    switch (kind_) {
      case NoiseKind::pareto_symmetric: {
        const double u = rng.next_open();
        if (u < 0.25) return -0.25 * std::pow(4.0 * u, -1.0 / param_);
        if (u <= 0.75) return u - 0.5;
        return 0.25 * std::pow(4.0 * (1.0 - u), -1.0 / param_);
      }
      case NoiseKind::student_t: {
        const double z = draw_standard_normal(rng);
        const double chi2 = 2.0 * draw_gamma(0.5 * param_, rng);
        return z * std::sqrt(param_ / chi2);
      }
      case NoiseKind::three_point: {
        const double u = rng.next_unit();
        constexpr double root3 = 1.7320508075688772935;
        if (u < 1.0 / 6.0) return root3;
        if (u < 1.0 / 3.0) return -root3;
        return 0.0;
      }
      case NoiseKind::standard_normal:
        return draw_standard_normal(rng);
    }
    return 0.0;
  }

  std::vector<double> sample(std::size_t count, std::uint64_t seed) const {
    require(count >= 1, "sample count must be positive");
    Rng rng(seed);
    std::vector<double> out(count);
    for (double& v : out) v = draw(rng);
    return out;
  }

  // P(|Z| > x), x > 0.  Closed form for Pareto, quadrature for t.
  double tail_prob(double x) const {
    require(x > 0, "tail_prob needs x > 0");
    switch (kind_) {
      case NoiseKind::pareto_symmetric:
        if (x < 0.25) return 1.0 - 2.0 * x;
        return 0.5 * std::pow(4.0 * x, -param_);
      case NoiseKind::student_t:
        return student_two_sided_tail(param_, x);
      default:
        throw std::domain_error("tail_prob: variant has no heavy-tail role");
    }
  }

  double density(double x) const {
    switch (kind_) {
      case NoiseKind::pareto_symmetric: {
        const double ax = std::abs(x);
        if (ax <= 0.25) return 1.0;
        return param_ * std::pow(4.0 * ax, -(param_ + 1.0));
      }
      case NoiseKind::student_t: {
        const double nu = param_;
        const double c = std::tgamma(0.5 * (nu + 1.0)) /
                         (std::sqrt(nu * std::numbers::pi) * std::tgamma(0.5 * nu));
        return c * std::pow(1.0 + x * x / nu, -0.5 * (nu + 1.0));
      }
      case NoiseKind::standard_normal:
        return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
      default:
        throw std::domain_error("density: three-point law is discrete");
    }
  }

  std::string name() const {
    switch (kind_) {
      case NoiseKind::pareto_symmetric: return "pareto(" + std::to_string(param_) + ")";
      case NoiseKind::student_t: return "student_t(" + std::to_string(param_) + ")";
      case NoiseKind::three_point: return "three_point";
      case NoiseKind::standard_normal: return "normal";
    }
    return "?";
  }

 private:
  TailModel(NoiseKind kind, double param) : kind_(kind), param_(param) {}

  static void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  }

  static double draw_standard_normal(Rng& rng) {
    const double u1 = rng.next_open();
    const double u2 = rng.next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Marsaglia-Tsang; shape < 1 boosted through gamma(a+1) * U^(1/a)
  static double draw_gamma(double shape, Rng& rng) {
    if (shape < 1.0) {
      const double u = rng.next_open();
      return draw_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      const double z = draw_standard_normal(rng);
      const double t = 1.0 + c * z;
      if (t <= 0.0) continue;
      const double v = t * t * t;
      const double u = rng.next_open();
      if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
      if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // int_0^X sin^{nu-1}(phi) dphi for X <= 0.1, by the expansion
  // sin^{nu-1}(phi) = phi^{nu-1} (1 + a2 phi^2 + a4 phi^4 + a6 phi^6 + ...).
  // Integrates the endpoint singularity of cos^{nu-1} near pi/2 exactly
  // enough (truncation below 1e-11) even for nu < 1.
  static double sin_power_tip(double nu, double X) {
    const double m = nu - 1.0;
    const double a2 = -m / 6.0;
    const double a4 = -m / 180.0 + m * m / 72.0;
    const double a6 = -m / 2835.0 + m * m / 1080.0 - m * m * m / 1296.0;
    const double X2 = X * X;
    return std::pow(X, nu) *
           (1.0 / nu + X2 * (a2 / (nu + 2.0) +
                             X2 * (a4 / (nu + 4.0) + X2 * a6 / (nu + 6.0))));
  }

  // P(|T_nu| > x) via the substitution t = sqrt(nu) tan(theta):
  // 2 c_nu sqrt(nu) * int_{atan(x/sqrt(nu))}^{pi/2} cos^{nu-1}(theta) dtheta.
  // The last 0.1 before pi/2 is handled by the series tip so that the
  // quadrature never meets the cos^{nu-1} endpoint singularity.
  static double student_two_sided_tail(double nu, double x) {
    const double c = std::tgamma(0.5 * (nu + 1.0)) /
                     (std::sqrt(nu * std::numbers::pi) * std::tgamma(0.5 * nu));
    const double theta0 = std::atan(x / std::sqrt(nu));
    const double pi_half = 0.5 * std::numbers::pi;
    const double theta_cut = pi_half - 0.1;
    double integral;
    if (theta0 >= theta_cut) {
      integral = sin_power_tip(nu, pi_half - theta0);
    } else {
      integral = detail::tanh_sinh(
                     [nu](double th) { return std::pow(std::cos(th), nu - 1.0); },
                     theta0, theta_cut) +
                 sin_power_tip(nu, 0.1);
    }
    return 2.0 * c * std::sqrt(nu) * integral;
  }

  NoiseKind kind_;
  double param_;
};

// a_k solving P(|Z| > a_k) = 1/k: exact power-branch inverse for the Pareto
// law, bisection on tail_prob otherwise.  Exactness (tail * k = 1) holds for
// k >= 2 where the inverse lands in the tail branch.
inline double normalizing_a(const TailModel& model, std::uint64_t k) {
  if (k < 1) throw std::invalid_argument("normalizing_a needs k >= 1");
  if (!model.heavy_tailed()) {
    throw std::domain_error("normalizing_a: variant has no heavy-tail role");
  }
  const double target = 1.0 / static_cast<double>(k);
  if (model.kind() == NoiseKind::pareto_symmetric) {
    return 0.25 * std::pow(0.5 * static_cast<double>(k), 1.0 / model.tail_index());
  }
  double lo = 1e-8, hi = 1.0;
  while (model.tail_prob(hi) > target) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (model.tail_prob(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if ((hi - lo) < 1e-10 * hi) break;
  }
  return 0.5 * (lo + hi);
}

struct NormalizingSeq {
  TailModel model;
  double operator()(std::uint64_t k) const { return normalizing_a(model, k); }
};

}  // namespace tailmat
