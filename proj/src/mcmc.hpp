#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "model.hpp"
#include "rng.hpp"

namespace rosenbench {

enum class Algorithm { RWM, MALA, SMMALA };

const char* algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

// How the absolute-eigenvalue metric treats eigenvalues that are too small.
// AbsEigenFloor (default): lambda' = max(|lambda|, 1/alpha).
// AbsEigenScale: |lambda| < 1/alpha is multiplied by alpha (an exact zero
// still gets the floor, scaling cannot repair it).
enum class MetricRegularization { AbsEigenFloor, AbsEigenScale };

// Position metric Sigma(x) for the preconditioned Langevin proposal, stored
// through the eigendecomposition of the regularized negated Hessian: Sigma =
// Q diag(1/lambda') Q^T, which is positive definite by construction.
class Metric {
public:
  static Metric identity(int dim);
  static Metric from_hessian(const Eigen::MatrixXd& hessian, double alpha,
                             MetricRegularization mode = MetricRegularization::AbsEigenFloor);

  int dim() const { return static_cast<int>(lambda_.size()); }
  bool is_identity() const { return is_identity_; }

  Eigen::MatrixXd sigma() const;               // dense Sigma
  Eigen::VectorXd sigma_mul(ConstVecRef v) const;
  double log_det_sigma() const;

  // Draw from N(0, h Sigma).
  Eigen::VectorXd sample_noise(double h, RngStream& rng) const;

  // log N(dev; 0, h Sigma).
  double log_density(double h, ConstVecRef dev) const;

  // Eigenvalues of the regularized precision (all >= the floor).
  const Eigen::VectorXd& precision_eigenvalues() const { return lambda_; }

private:
  Eigen::MatrixXd q_;       // eigenvectors (unused for the identity metric)
  Eigen::VectorXd lambda_;  // regularized precision eigenvalues, all > 0
  bool is_identity_ = false;
};

Metric regularized_metric(const Model& model, ConstVecRef x, double alpha,
                          MetricRegularization mode = MetricRegularization::AbsEigenFloor);

struct SamplerConfig {
  Algorithm algorithm = Algorithm::SMMALA;
  double h = 0.5;          // step size; warmup tunes it toward target_accept
  double alpha = 1e6;      // metric regularization strength
  long n_steps = 10000;    // post-warmup steps
  long warmup = 1000;      // adaptation steps, discarded
  double target_accept = 0.5;
  Eigen::VectorXd init;    // empty means the all-ones start
  long thin = 1;           // storage policy only
  MetricRegularization regularization = MetricRegularization::AbsEigenFloor;
  bool record_trace = false;
};

// Per-step record for offline replay of the acceptance rule.
struct StepTrace {
  Eigen::VectorXd x;
  Eigen::VectorXd x_prop;
  double log_pi_x = 0.0;
  double log_pi_prop = 0.0;
  double log_q_fwd = 0.0;
  double log_q_rev = 0.0;
  double log_u = 0.0;
  bool accepted = false;
  bool divergent = false;
};

struct Chain {
  RowMatrixXd states;                   // kept (thinned) states
  std::vector<std::uint8_t> accepted;   // one flag per post-warmup step
  long divergences = 0;
  double tuned_h = 0.0;
  SamplerConfig config;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::vector<StepTrace> trace;

  double acceptance_rate() const;
};

struct Proposal {
  Eigen::VectorXd x;
  double log_q_fwd = 0.0;
  bool divergent = false;
};

// One draw of x' = x + (h/2) Sigma grad + N(0, h Sigma); RWM drops the drift.
Proposal propose(ConstVecRef x, ConstVecRef grad_x, double h,
                 const Metric& metric, Algorithm algorithm, RngStream& rng);

double mh_log_ratio(double log_pi_x, double log_pi_prop, double log_q_fwd,
                    double log_q_rev);
bool mh_accept(double log_ratio, double log_u);

// Warmup step-size rule: log h moves by t^{-0.6} times the window's excess
// acceptance over the target, once per window.
double tuned_log_step(double log_h, double window_rate, double target_accept,
                      long window_index);

Chain run_chain(const Model& model, const SamplerConfig& config, RngStream rng);

std::string chain_meta_json(const Chain& chain);
void write_csv(const Chain& chain, const Model& model, const std::string& path);
void write_binary(const Chain& chain, const std::string& path);

}  // namespace rosenbench
