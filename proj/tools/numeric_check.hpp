#pragma once

// Numerical verification of the closed-form normalizing constants, working
// only through the public kernel evaluation. Two routes: adaptive quadrature
// for the 2-d kernel, importance sampling against an inflated ancestral
// proposal for the hybrid kernel.

#include <cmath>
#include <functional>
#include <vector>

#include "cli_util.hpp"
#include "rosenbench.h"

namespace cli {

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double fa, double fm, double fb,
                               double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 36);
}

}  // namespace detail

// Integral of exp(log kernel) over the plane for a twod model. The inner
// integration window follows the parabola where the conditional mass sits, so
// narrow ridges are never missed by the subdivision.
inline double twod_kernel_integral(const rb_model* model, double mu, double a,
                                   double b) {
  const double sigma1 = 1.0 / std::sqrt(2.0 * a);
  const double sigma2 = 1.0 / std::sqrt(2.0 * b);
  const double inner_scale = std::sqrt(2.0 * M_PI) * sigma2;

  auto marginal = [&](double x1) {
    auto f = [&](double x2) {
      const double point[2] = {x1, x2};
      double lk = 0.0;
      check(rb_log_kernel(model, point, 2, &lk), "log kernel");
      return std::exp(lk);
    };
    const double c = x1 * x1;
    return detail::integrate(f, c - 10.0 * sigma2, c + 10.0 * sigma2,
                             1e-9 * inner_scale);
  };
  const double outer_scale = std::sqrt(2.0 * M_PI) * sigma1 * inner_scale;
  return detail::integrate(marginal, mu - 10.0 * sigma1, mu + 10.0 * sigma1,
                           1e-9 * outer_scale);
}

// Log of the integral of exp(log kernel) estimated by importance sampling.
// The proposal is the model's own ancestral factorization with every factor
// variance inflated 1.5x, whose density is a plain product of Gaussian pdfs;
// the closed-form constant never enters the estimate.
inline double hybrid_log_integral_is(const rb_model* model, long n_samples,
                                     std::uint64_t seed) {
  const int dim = rb_model_dim(model);
  const int n_factors = rb_model_factor_count(model);
  if (n_factors < 0) throw CliError("model is not decomposable");

  std::vector<rb_factor> factors(static_cast<std::size_t>(n_factors));
  for (int k = 0; k < n_factors; ++k)
    check(rb_model_factor(model, k, &factors[static_cast<std::size_t>(k)]),
          "factor");

  const double inflate = 1.5;
  VerifierRng rng(seed);
  std::vector<double> x(static_cast<std::size_t>(dim));

  // streaming log-sum-exp
  double running_max = -std::numeric_limits<double>::infinity();
  double running_sum = 0.0;

  for (long s = 0; s < n_samples; ++s) {
    double log_q = 0.0;
    for (const auto& f : factors) {
      const double mean =
          f.parent < 0 ? f.mu
                       : x[static_cast<std::size_t>(f.parent)] *
                             x[static_cast<std::size_t>(f.parent)];
      const double var = inflate * f.variance;
      const double draw = mean + std::sqrt(var) * rng.normal();
      x[static_cast<std::size_t>(f.index)] = draw;
      const double dev = draw - mean;
      log_q += -0.5 * dev * dev / var - 0.5 * std::log(2.0 * M_PI * var);
    }
    double lk = 0.0;
    check(rb_log_kernel(model, x.data(), dim, &lk), "log kernel");
    const double log_w = lk - log_q;
    if (log_w > running_max) {
      running_sum = running_sum * std::exp(running_max - log_w) + 1.0;
      running_max = log_w;
    } else {
      running_sum += std::exp(log_w - running_max);
    }
  }
  return running_max + std::log(running_sum) -
         std::log(static_cast<double>(n_samples));
}

}  // namespace cli
