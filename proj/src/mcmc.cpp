#include "mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "io_util.hpp"

namespace rosenbench {

namespace {
constexpr double kLogStepMin = -60.0;
constexpr double kLogStepMax = 60.0;
constexpr long kTuneWindow = 50;
}  // namespace

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::RWM: return "rwm";
    case Algorithm::MALA: return "mala";
    case Algorithm::SMMALA: return "smmala";
  }
  return "?";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "rwm") return Algorithm::RWM;
  if (name == "mala") return Algorithm::MALA;
  if (name == "smmala") return Algorithm::SMMALA;
  raise(ErrorCode::InvalidArgument, "unknown algorithm '" + name + "'");
}

Metric Metric::identity(int dim) {
  Metric m;
  m.lambda_ = Eigen::VectorXd::Ones(dim);
  m.is_identity_ = true;
  return m;
}

Metric Metric::from_hessian(const Eigen::MatrixXd& hessian, double alpha,
                            MetricRegularization mode) {
  if (hessian.rows() != hessian.cols())
    raise(ErrorCode::InvalidArgument, "hessian must be square");
  if (!(alpha > 0.0))
    raise(ErrorCode::InvalidArgument, "alpha must be positive");
  if (!hessian.allFinite())
    raise(ErrorCode::Numerical, "hessian has non-finite entries");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hessian);
  if (solver.info() != Eigen::Success)
    raise(ErrorCode::Numerical, "symmetric eigendecomposition failed");

  const double floor = 1.0 / alpha;
  Metric m;
  m.q_ = solver.eigenvectors();
  m.lambda_ = solver.eigenvalues().cwiseAbs();
  for (Eigen::Index i = 0; i < m.lambda_.size(); ++i) {
    double& lam = m.lambda_[i];
    if (mode == MetricRegularization::AbsEigenFloor) {
      lam = std::max(lam, floor);
    } else {
      if (lam == 0.0)
        lam = floor;
      else if (lam < floor)
        lam *= alpha;
    }
  }
  m.is_identity_ = false;
  return m;
}

Eigen::MatrixXd Metric::sigma() const {
  if (is_identity_)
    return Eigen::MatrixXd::Identity(lambda_.size(), lambda_.size());
  return q_ * lambda_.cwiseInverse().asDiagonal() * q_.transpose();
}

Eigen::VectorXd Metric::sigma_mul(ConstVecRef v) const {
  if (is_identity_) return v;
  return q_ * (lambda_.cwiseInverse().asDiagonal() * (q_.transpose() * v));
}

double Metric::log_det_sigma() const {
  return -lambda_.array().log().sum();
}

Eigen::VectorXd Metric::sample_noise(double h, RngStream& rng) const {
  Eigen::VectorXd z(lambda_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  const double root_h = std::sqrt(h);
  if (is_identity_) return root_h * z;
  return root_h * (q_ * (lambda_.cwiseSqrt().cwiseInverse().asDiagonal() * z));
}

double Metric::log_density(double h, ConstVecRef dev) const {
  const double d = static_cast<double>(lambda_.size());
  const double log_two_pi = std::log(2.0 * std::numbers::pi);
  if (is_identity_)
    return -0.5 * d * (log_two_pi + std::log(h)) - 0.5 * dev.squaredNorm() / h;
  const Eigen::VectorXd w = q_.transpose() * dev;
  const double quad = (w.array().square() * lambda_.array()).sum() / h;
  const double log_det = d * std::log(h) + log_det_sigma();
  return -0.5 * (d * log_two_pi + log_det + quad);
}

Metric regularized_metric(const Model& model, ConstVecRef x, double alpha,
                          MetricRegularization mode) {
  try {
    return Metric::from_hessian(model.hessian_log_kernel(x), alpha, mode);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Numerical) throw;
    std::ostringstream os;
    os << e.what() << " at point [";
    for (Eigen::Index i = 0; i < x.size(); ++i)
      os << (i ? ", " : "") << x[i];
    os << "]";
    raise(ErrorCode::Numerical, os.str());
  }
}

Proposal propose(ConstVecRef x, ConstVecRef grad_x, double h,
                 const Metric& metric, Algorithm algorithm, RngStream& rng) {
  Proposal p;
  const Eigen::VectorXd noise = metric.sample_noise(h, rng);
  Eigen::VectorXd mean = x;
  if (algorithm != Algorithm::RWM)
    mean += 0.5 * h * metric.sigma_mul(grad_x);
  p.x = mean + noise;
  if (!mean.allFinite() || !p.x.allFinite()) {
    p.divergent = true;
    p.log_q_fwd = std::numeric_limits<double>::quiet_NaN();
    return p;
  }
  p.log_q_fwd = metric.log_density(h, noise);
  p.divergent = !std::isfinite(p.log_q_fwd);
  return p;
}

double mh_log_ratio(double log_pi_x, double log_pi_prop, double log_q_fwd,
                    double log_q_rev) {
  return (log_pi_prop + log_q_rev) - (log_pi_x + log_q_fwd);
}

bool mh_accept(double log_ratio, double log_u) {
  return log_u < log_ratio;
}

double tuned_log_step(double log_h, double window_rate, double target_accept,
                      long window_index) {
  const double gamma = std::pow(static_cast<double>(window_index), -0.6);
  double next = log_h + gamma * (window_rate - target_accept);
  return std::clamp(next, kLogStepMin, kLogStepMax);
}

double Chain::acceptance_rate() const {
  if (accepted.empty()) return 0.0;
  long n = 0;
  for (auto f : accepted) n += f;
  return static_cast<double>(n) / static_cast<double>(accepted.size());
}

namespace {

struct CachedState {
  Eigen::VectorXd x;
  double log_pi = 0.0;
  Eigen::VectorXd grad;
  Metric metric;
};

struct StepOutcome {
  bool accepted = false;
  bool divergent = false;
  StepTrace trace;
};

// One MH transition. All three algorithms go through this path; RWM and MALA
// simply carry the identity metric (and RWM a zero drift).
StepOutcome transition(const Model& model, CachedState& cur, double h,
                       const SamplerConfig& cfg, RngStream& rng,
                       bool want_trace) {
  StepOutcome out;
  const bool needs_metric = cfg.algorithm == Algorithm::SMMALA;

  Proposal prop = propose(cur.x, cur.grad, h, cur.metric, cfg.algorithm, rng);
  double log_pi_prop = std::numeric_limits<double>::quiet_NaN();
  double log_q_rev = std::numeric_limits<double>::quiet_NaN();
  double log_ratio = -std::numeric_limits<double>::infinity();

  DensityEval eval_prop;
  Metric metric_prop;
  bool divergent = prop.divergent;

  if (!divergent) {
    try {
      eval_prop = model.eval(prop.x, needs_metric);
    } catch (const Error&) {
      divergent = true;
    }
  }
  if (!divergent) {
    divergent = !std::isfinite(eval_prop.log_kernel) || !eval_prop.grad.allFinite();
  }
  if (!divergent) {
    if (needs_metric) {
      try {
        metric_prop = Metric::from_hessian(*eval_prop.hessian, cfg.alpha,
                                           cfg.regularization);
      } catch (const Error&) {
        divergent = true;
      }
    } else {
      metric_prop = Metric::identity(model.dim());
    }
  }
  if (!divergent) {
    // Reverse density with the metric rebuilt at the proposal.
    Eigen::VectorXd mean_rev = prop.x;
    if (cfg.algorithm != Algorithm::RWM)
      mean_rev += 0.5 * h * metric_prop.sigma_mul(eval_prop.grad);
    if (!mean_rev.allFinite()) {
      divergent = true;
    } else {
      log_q_rev = metric_prop.log_density(h, cur.x - mean_rev);
      log_pi_prop = eval_prop.log_kernel;
      log_ratio = mh_log_ratio(cur.log_pi, log_pi_prop, prop.log_q_fwd, log_q_rev);
      divergent = !std::isfinite(log_q_rev);
    }
  }

  const double log_u = std::log(rng.uniform());
  const bool accepted = !divergent && mh_accept(log_ratio, log_u);

  if (want_trace) {
    out.trace.x = cur.x;
    out.trace.x_prop = prop.x;
    out.trace.log_pi_x = cur.log_pi;
    out.trace.log_pi_prop = log_pi_prop;
    out.trace.log_q_fwd = prop.log_q_fwd;
    out.trace.log_q_rev = log_q_rev;
    out.trace.log_u = log_u;
    out.trace.accepted = accepted;
    out.trace.divergent = divergent;
  }

  if (accepted) {
    cur.x = std::move(prop.x);
    cur.log_pi = eval_prop.log_kernel;
    cur.grad = std::move(eval_prop.grad);
    cur.metric = std::move(metric_prop);
  }
  out.accepted = accepted;
  out.divergent = divergent;
  return out;
}

}  // namespace

Chain run_chain(const Model& model, const SamplerConfig& config, RngStream rng) {
  if (!(config.h > 0.0)) raise(ErrorCode::InvalidArgument, "h must be positive");
  if (!(config.alpha > 0.0)) raise(ErrorCode::InvalidArgument, "alpha must be positive");
  if (config.thin < 1) raise(ErrorCode::InvalidArgument, "thin must be >= 1");
  if (config.n_steps < 1) raise(ErrorCode::InvalidArgument, "n_steps must be >= 1");
  if (config.warmup < 0) raise(ErrorCode::InvalidArgument, "warmup must be >= 0");
  if (!(config.target_accept > 0.0 && config.target_accept < 1.0))
    raise(ErrorCode::InvalidArgument, "target_accept must lie in (0,1)");

  Chain chain;
  chain.config = config;
  chain.seed = rng.seed();
  chain.stream_id = rng.stream_id();

  CachedState cur;
  cur.x = config.init.size() == 0 ? Eigen::VectorXd::Ones(model.dim()).eval()
                                  : config.init;
  if (cur.x.size() != model.dim())
    raise(ErrorCode::DimensionMismatch, "init state does not match model dimension");
  chain.config.init = cur.x;

  const bool needs_metric = config.algorithm == Algorithm::SMMALA;
  DensityEval ev = model.eval(cur.x, needs_metric);
  if (!std::isfinite(ev.log_kernel))
    raise(ErrorCode::Numerical, "initial state has non-finite log density");
  cur.log_pi = ev.log_kernel;
  cur.grad = std::move(ev.grad);
  cur.metric = needs_metric ? Metric::from_hessian(*ev.hessian, config.alpha,
                                                   config.regularization)
                            : Metric::identity(model.dim());

  double h = config.h;
  double log_h = std::log(h);
  long window_accepts = 0;
  long window_steps = 0;
  long window_index = 0;

  for (long t = 0; t < config.warmup; ++t) {
    const StepOutcome o = transition(model, cur, h, config, rng, false);
    chain.divergences += o.divergent;
    window_accepts += o.accepted;
    if (++window_steps == kTuneWindow) {
      ++window_index;
      const double rate =
          static_cast<double>(window_accepts) / static_cast<double>(kTuneWindow);
      log_h = tuned_log_step(log_h, rate, config.target_accept, window_index);
      h = std::exp(log_h);
      window_accepts = 0;
      window_steps = 0;
    }
  }
  chain.tuned_h = h;  // frozen from here on

  const long kept = config.n_steps / config.thin;
  chain.states.resize(kept, model.dim());
  chain.accepted.assign(static_cast<std::size_t>(config.n_steps), 0);
  if (config.record_trace)
    chain.trace.reserve(static_cast<std::size_t>(config.n_steps));

  long row = 0;
  for (long t = 0; t < config.n_steps; ++t) {
    StepOutcome o = transition(model, cur, h, config, rng, config.record_trace);
    chain.divergences += o.divergent;
    chain.accepted[static_cast<std::size_t>(t)] = o.accepted ? 1 : 0;
    if (config.record_trace) chain.trace.push_back(std::move(o.trace));
    if (!cur.x.allFinite()) {
      std::ostringstream os;
      os << "chain reached a non-finite state at step " << t;
      raise(ErrorCode::Numerical, os.str());
    }
    if ((t + 1) % config.thin == 0) chain.states.row(row++) = cur.x;
  }
  return chain;
}

std::string chain_meta_json(const Chain& chain) {
  nlohmann::json j;
  j["tuned_h"] = chain.tuned_h;
  j["acceptance_rate"] = chain.acceptance_rate();
  j["divergences"] = chain.divergences;
  j["seed"] = chain.seed;
  j["stream_id"] = chain.stream_id;
  j["kept_states"] = chain.states.rows();
  j["dim"] = chain.states.cols();
  j["gaussian_method"] = RngStream::kNormalMethod;
  nlohmann::json cfg;
  cfg["algorithm"] = algorithm_name(chain.config.algorithm);
  cfg["h"] = chain.config.h;
  cfg["alpha"] = chain.config.alpha;
  cfg["n_steps"] = chain.config.n_steps;
  cfg["warmup"] = chain.config.warmup;
  cfg["target_accept"] = chain.config.target_accept;
  cfg["thin"] = chain.config.thin;
  cfg["regularization"] =
      chain.config.regularization == MetricRegularization::AbsEigenFloor
          ? "abs-eigen-floor"
          : "abs-eigen-scale";
  auto init = nlohmann::json::array();
  for (Eigen::Index i = 0; i < chain.config.init.size(); ++i)
    init.push_back(chain.config.init[i]);
  cfg["init"] = std::move(init);
  j["config"] = std::move(cfg);
  return j.dump(2);
}

void write_csv(const Chain& chain, const Model& model, const std::string& path) {
  write_matrix_csv(chain.states, model.component_names(), path);
}

void write_binary(const Chain& chain, const std::string& path) {
  write_matrix_binary(chain.states, path);
}

}  // namespace rosenbench
