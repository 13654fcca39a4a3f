#pragma once

// Adaptive Simpson quadrature used as an independent numerical oracle for
// normalizing-constant checks. Works on the kernel through function values
// only.

#include <cmath>
#include <functional>

namespace oracle {

namespace detail {

template <typename F>
double simpson(const F& f, double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive(const F& f, double a, double b, double fa, double fm, double fb,
                double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

template <typename F>
double integrate(const F& f, double a, double b, double tol, int depth = 40) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = detail::simpson(f, a, b, fa, fm, fb);
  return detail::adaptive(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Integral of exp(log_kernel(x1, x2)) for a 2-d kernel whose conditional mass
// in x2 sits within half_width_2 of x1^2. The outer range covers the x1
// marginal; the inner window tracks the parabola, so the bump is never missed.
inline double twod_kernel_integral(
    const std::function<double(double, double)>& log_kernel, double mu,
    double sigma1, double sigma2, double rel_tol = 1e-9) {
  const double x_lo = mu - 10.0 * sigma1;
  const double x_hi = mu + 10.0 * sigma1;
  const double inner_scale = std::sqrt(2.0 * M_PI) * sigma2;

  auto marginal = [&](double x1) {
    auto f = [&](double x2) { return std::exp(log_kernel(x1, x2)); };
    const double c = x1 * x1;
    return integrate(f, c - 10.0 * sigma2, c + 10.0 * sigma2,
                     rel_tol * inner_scale, 36);
  };
  const double outer_scale = std::sqrt(2.0 * M_PI) * sigma1 * inner_scale;
  return integrate(marginal, x_lo, x_hi, rel_tol * outer_scale, 36);
}

}  // namespace oracle
