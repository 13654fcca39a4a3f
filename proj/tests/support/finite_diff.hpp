#pragma once

// Finite-difference oracles built from function values only, independent of
// any analytic derivative code they are used to check.

#include <Eigen/Dense>

namespace oracle {

template <typename F>
Eigen::VectorXd fd_gradient(const F& f, const Eigen::VectorXd& x,
                            double eps = 1e-6) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd hi = x, lo = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    hi[i] = x[i] + eps;
    lo[i] = x[i] - eps;
    g[i] = (f(hi) - f(lo)) / (2.0 * eps);
    hi[i] = x[i];
    lo[i] = x[i];
  }
  return g;
}

template <typename F>
Eigen::MatrixXd fd_hessian(const F& f, const Eigen::VectorXd& x,
                           double eps = 1e-4) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd h(n, n);
  const double f0 = f(x);
  Eigen::VectorXd p = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    p[i] = x[i] + eps;
    const double fp = f(p);
    p[i] = x[i] - eps;
    const double fm = f(p);
    p[i] = x[i];
    h(i, i) = (fp - 2.0 * f0 + fm) / (eps * eps);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      p[i] = x[i] + eps; p[j] = x[j] + eps;
      const double fpp = f(p);
      p[j] = x[j] - eps;
      const double fpm = f(p);
      p[i] = x[i] - eps;
      const double fmm = f(p);
      p[j] = x[j] + eps;
      const double fmp = f(p);
      p[i] = x[i]; p[j] = x[j];
      h(i, j) = h(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * eps * eps);
    }
  }
  return h;
}

}  // namespace oracle
