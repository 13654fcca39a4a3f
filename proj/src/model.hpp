#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace rosenbench {

using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstVecRef = Eigen::Ref<const Eigen::VectorXd>;

enum class Family { TwoD, Full, Even, Hybrid };

const char* family_name(Family f);

// 2-d kernel in general form: exp{ -a (x1-mu)^2 - b (x2-x1^2)^2 }.
// The classic parametrisation is mu=1, a=1/20, b=100/20.
struct TwoDParams {
  double mu = 1.0;
  double a = 0.05;
  double b = 5.0;
};

// Chained n-dimensional kernel:
//   exp{ -sum_{i<n} scale * [ quad_coeff (x_{i+1}-x_i^2)^2 + (mu-x_i)^2 ] }.
// Every interior variable carries both a quadratic attraction to mu and a
// link to its successor, so the joint does not factor into conditionals.
struct FullParams {
  int n = 3;
  double scale = 0.05;
  double quad_coeff = 100.0;
  double mu = 1.0;

  // General-form coefficients of one chain segment (the a,b,c,d view of the
  // 3-d kernel): a = c = scale, b = d = quad_coeff * scale.
  double coeff_a() const { return scale; }
  double coeff_b() const { return scale * quad_coeff; }
};

// Product of n/2 independent 2-d kernels:
//   exp{ -sum_k scale * [ (x_{2k-1}-mu_k)^2 + quad_coeff (x_{2k}-x_{2k-1}^2)^2 ] }.
struct EvenParams {
  int n = 4;
  std::vector<double> mus;  // one location per pair, length n/2
  double scale = 0.05;
  double quad_coeff = 100.0;

  double coeff_a() const { return scale; }
  double coeff_b() const { return scale * quad_coeff; }
};

// Block-structured kernel, dimension n = (n1-1)*n2 + 1:
//   exp{ -a (x1-mu)^2 - sum_{j=1..n2} sum_{i=2..n1} b_{j,i} (x_{j,i}-x_{j,i-1}^2)^2 }
// with x_{j,1} = x1 shared by all blocks. b(j-1, i-2) stores b_{j,i}.
struct HybridParams {
  double mu = 1.0;
  double a = 0.05;
  Eigen::MatrixXd b;  // n2 rows, n1-1 columns, all entries > 0
  int n1 = 3;
  int n2 = 2;

  static HybridParams uniform(int n1, int n2, double mu, double a, double b);
};

// One quadratic term of a kernel exponent. parent < 0 means a location term
// coeff*(x[index]-mu)^2; otherwise a link term coeff*(x[index]-x[parent]^2)^2.
// For decomposable families each term is one conditional Gaussian factor:
// N(mu, 1/(2 coeff)) for the root, N(x_parent^2, 1/(2 coeff)) for links.
struct GaussianTerm {
  int index;
  int parent;    // -1 for location terms
  double coeff;  // a or b_{j,i}
  double mu;     // only meaningful for location terms

  double variance() const { return 1.0 / (2.0 * coeff); }
  double mean(double parent_value) const {
    return parent < 0 ? mu : parent_value * parent_value;
  }
};

struct ConditionalGaussian {
  double mean;
  double variance;
};

struct DensityEval {
  double log_kernel;
  Eigen::VectorXd grad;
  std::optional<Eigen::MatrixXd> hessian;
};

class Model {
public:
  static Model twod(const TwoDParams& p);
  static Model full(const FullParams& p);
  static Model even(const EvenParams& p);
  static Model hybrid(const HybridParams& p);

  static Model from_json(const std::string& text);
  std::string to_json() const;

  Family family() const { return family_; }
  int dim() const { return dim_; }

  const TwoDParams& twod_params() const;
  const FullParams& full_params() const;
  const EvenParams& even_params() const;
  const HybridParams& hybrid_params() const;

  // Natural log of the unnormalized density. Finite for finite x.
  double log_kernel(ConstVecRef x) const;

  // Analytic gradient of log_kernel.
  Eigen::VectorXd grad_log_kernel(ConstVecRef x) const;

  // Analytic Hessian, exactly symmetric; entry (u,v) is exactly zero unless
  // u == v or u,v are parent/child in the dependency graph.
  Eigen::MatrixXd hessian_log_kernel(ConstVecRef x) const;

  // Fused value+gradient (+Hessian on request).
  DensityEval eval(ConstVecRef x, bool with_hessian = false) const;

  // Closed-form log normalizing constant. Available for the 2-d and Hybrid
  // kernels; the Full and Even constants are not known in closed form.
  std::optional<double> log_norm_constant() const;

  bool decomposable() const;

  // Ancestral factorization in topological order (root first, each parent
  // before its children). Errors with NotAvailable for the Full family.
  const std::vector<GaussianTerm>& conditional_decomposition() const;

  // Conditional law of x2 given x1 after marginalizing x3 out of the 3-d Full
  // kernel: N( (2b x1^2 + 2c mu)/(2b+2c), 1/(2b+2c) ) with b = quad*scale,
  // c = scale. Only defined for Full with n = 3.
  ConditionalGaussian full3d_conditional_x2(double x1) const;

  // Column labels: "x_1","x_2",... and for Hybrid "x_1","x_1_2",...,"x_{n2}_{n1}".
  std::vector<std::string> component_names() const;

private:
  Model() = default;

  void compile_terms();
  void check_point(ConstVecRef x) const;

  Family family_ = Family::TwoD;
  std::variant<TwoDParams, FullParams, EvenParams, HybridParams> params_;
  int dim_ = 0;
  std::vector<GaussianTerm> terms_;  // sorted by index
  bool decomposable_ = false;
};

}  // namespace rosenbench
