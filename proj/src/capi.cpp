#include "rosenbench.h"

#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "diagnostics.hpp"
#include "exact_sampler.hpp"
#include "io_util.hpp"
#include "mcmc.hpp"
#include "model.hpp"
#include "rng.hpp"

using namespace rosenbench;

struct rb_model {
  Model model;
};

struct rb_batch {
  std::optional<SampleBatch> batch;  // absent for batches read back from disk
  RowMatrixXd raw;

  const RowMatrixXd& draws() const { return batch ? batch->draws : raw; }
};

struct rb_config {
  SamplerConfig config;
};

struct rb_chain {
  Chain chain;
};

namespace {

thread_local std::string g_last_error;

rb_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return RB_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return RB_ERR_DIMENSION_MISMATCH;
    case ErrorCode::NonFiniteInput: return RB_ERR_NONFINITE_INPUT;
    case ErrorCode::NotAvailable: return RB_ERR_NOT_AVAILABLE;
    case ErrorCode::Numerical: return RB_ERR_NUMERICAL;
    case ErrorCode::Io: return RB_ERR_IO;
    case ErrorCode::Parse: return RB_ERR_PARSE;
  }
  return RB_ERR_INVALID_ARGUMENT;
}

rb_status fail(rb_status status, const char* message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
rb_status guarded(Fn&& fn) {
  try {
    fn();
    return RB_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RB_ERR_NUMERICAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RB_ERR_NUMERICAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* rb_version(void) { return "0.1.0"; }

const char* rb_status_name(rb_status status) {
  switch (status) {
    case RB_OK: return "ok";
    case RB_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case RB_ERR_DIMENSION_MISMATCH: return "dimension-mismatch";
    case RB_ERR_NONFINITE_INPUT: return "nonfinite-input";
    case RB_ERR_NOT_AVAILABLE: return "not-available";
    case RB_ERR_NUMERICAL: return "numerical";
    case RB_ERR_IO: return "io";
    case RB_ERR_PARSE: return "parse";
  }
  return "?";
}

const char* rb_last_error(void) { return g_last_error.c_str(); }

void rb_string_free(char* s) { delete[] s; }

/* ---- models ---------------------------------------------------------- */

rb_status rb_model_twod(double mu, double a, double b, rb_model** out) {
  if (!out) return fail(RB_ERR_INVALID_ARGUMENT, "out is null");
  return guarded([&] { *out = new rb_model{Model::twod({mu, a, b})}; });
}

rb_status rb_model_full(int n, double scale, double quad_coeff, double mu,
                        rb_model** out) {
  if (!out) return fail(RB_ERR_INVALID_ARGUMENT, "out is null");
  return guarded([&] {
    *out = new rb_model{Model::full({n, scale, quad_coeff, mu})};
  });
}

rb_status rb_model_even(int n, const double* mus, double scale,
                        double quad_coeff, rb_model** out) {
  if (!out || !mus) return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    EvenParams p;
    p.n = n;
    p.scale = scale;
    p.quad_coeff = quad_coeff;
    if (n >= 2) p.mus.assign(mus, mus + n / 2);
    *out = new rb_model{Model::even(p)};
  });
}

rb_status rb_model_hybrid(double mu, double a, const double* b, int n1, int n2,
                          rb_model** out) {
  if (!out || !b) return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    HybridParams p;
    p.mu = mu;
    p.a = a;
    p.n1 = n1;
    p.n2 = n2;
    if (n1 >= 2 && n2 >= 1) {
      p.b.resize(n2, n1 - 1);
      for (int r = 0; r < n2; ++r)
        for (int c = 0; c < n1 - 1; ++c) p.b(r, c) = b[r * (n1 - 1) + c];
    }
    *out = new rb_model{Model::hybrid(p)};
  });
}

rb_status rb_model_from_json(const char* json_text, rb_model** out) {
  if (!out || !json_text) return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new rb_model{Model::from_json(json_text)}; });
}

rb_status rb_model_to_json(const rb_model* model, char** json_out) {
  if (!model || !json_out) return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *json_out = dup_string(model->model.to_json()); });
}

void rb_model_free(rb_model* model) { delete model; }

int rb_model_dim(const rb_model* model) { return model ? model->model.dim() : 0; }

const char* rb_model_family(const rb_model* model) {
  return model ? family_name(model->model.family()) : "?";
}

const char* rb_model_component_name(const rb_model* model, int index) {
  if (!model || index < 0 || index >= model->model.dim()) return nullptr;
  thread_local std::string name;
  name = model->model.component_names()[static_cast<std::size_t>(index)];
  return name.c_str();
}

rb_status rb_log_kernel(const rb_model* model, const double* x, int n,
                        double* out) {
  if (!model || !x || !out) return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = model->model.log_kernel(Eigen::Map<const Eigen::VectorXd>(x, n));
  });
}

rb_status rb_grad_log_kernel(const rb_model* model, const double* x, int n,
                             double* grad_out) {
  if (!model || !x || !grad_out)
    return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const Eigen::VectorXd g =
        model->model.grad_log_kernel(Eigen::Map<const Eigen::VectorXd>(x, n));
    Eigen::Map<Eigen::VectorXd>(grad_out, g.size()) = g;
  });
}

rb_status rb_hessian_log_kernel(const rb_model* model, const double* x, int n,
                                double* hess_out) {
  if (!model || !x || !hess_out)
    return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const Eigen::MatrixXd h = model->model.hessian_log_kernel(
        Eigen::Map<const Eigen::VectorXd>(x, n));
    Eigen::Map<RowMatrixXd>(hess_out, h.rows(), h.cols()) = h;
  });
}

rb_status rb_log_norm_constant(const rb_model* model, double* out) {
  if (!model || !out) return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto c = model->model.log_norm_constant();
    if (!c)
      raise(ErrorCode::NotAvailable,
            "normalizing constant is not known for this family");
    *out = *c;
  });
}

int rb_model_factor_count(const rb_model* model) {
  if (!model || !model->model.decomposable()) return -1;
  return static_cast<int>(model->model.conditional_decomposition().size());
}

rb_status rb_model_factor(const rb_model* model, int k, rb_factor* out) {
  if (!model || !out) return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& factors = model->model.conditional_decomposition();
    if (k < 0 || k >= static_cast<int>(factors.size()))
      raise(ErrorCode::InvalidArgument, "factor index out of range");
    const auto& f = factors[static_cast<std::size_t>(k)];
    *out = {f.index, f.parent, f.coeff, f.mu, f.variance()};
  });
}

rb_status rb_full3d_conditional_x2(const rb_model* model, double x1,
                                   double* mean, double* variance) {
  if (!model || !mean || !variance)
    return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const ConditionalGaussian g = model->model.full3d_conditional_x2(x1);
    *mean = g.mean;
    *variance = g.variance;
  });
}

/* ---- exact sampling --------------------------------------------------- */

rb_status rb_sample_exact(const rb_model* model, long n_samples, uint64_t seed,
                          uint64_t stream_id, rb_batch** out) {
  if (!model || !out) return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto b = std::make_unique<rb_batch>();
    b->batch = sample_exact(model->model, n_samples, RngStream(seed, stream_id));
    *out = b.release();
  });
}

void rb_batch_free(rb_batch* batch) { delete batch; }

long rb_batch_rows(const rb_batch* batch) {
  return batch ? static_cast<long>(batch->draws().rows()) : 0;
}

int rb_batch_cols(const rb_batch* batch) {
  return batch ? static_cast<int>(batch->draws().cols()) : 0;
}

const double* rb_batch_data(const rb_batch* batch) {
  return batch ? batch->draws().data() : nullptr;
}

const char* rb_batch_gaussian_method(const rb_batch* batch) {
  return batch && batch->batch ? batch->batch->gaussian_method.c_str() : "";
}

rb_status rb_batch_write_csv(const rb_batch* batch, const char* path) {
  if (!batch || !path) return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  if (!batch->batch)
    return fail(RB_ERR_NOT_AVAILABLE, "batch read from disk has no model");
  return guarded([&] { write_csv(*batch->batch, path); });
}

rb_status rb_batch_write_binary(const rb_batch* batch, const char* path) {
  if (!batch || !path) return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { write_matrix_binary(batch->draws(), path); });
}

rb_status rb_batch_read_binary(const char* path, rb_batch** out) {
  if (!path || !out) return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto b = std::make_unique<rb_batch>();
    b->raw = read_matrix_binary(path);
    *out = b.release();
  });
}

rb_status rb_batch_residual_stats(const rb_batch* batch, rb_factor_stats* stats,
                                  int capacity, int* count) {
  if (!batch || !stats || !count)
    return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  if (!batch->batch)
    return fail(RB_ERR_NOT_AVAILABLE, "batch read from disk has no model");
  return guarded([&] {
    const auto all = conditional_moment_check(*batch->batch);
    if (capacity < static_cast<int>(all.size()))
      raise(ErrorCode::InvalidArgument, "stats buffer too small");
    for (std::size_t k = 0; k < all.size(); ++k) {
      const auto& s = all[k];
      stats[k] = {s.index,    s.parent,
                  s.n,        s.mean,
                  s.variance, s.skewness,
                  s.variance_defined ? 1 : 0,
                  s.skewness_defined ? 1 : 0};
    }
    *count = static_cast<int>(all.size());
  });
}

/* ---- samplers --------------------------------------------------------- */

rb_status rb_config_new(rb_config** out) {
  if (!out) return fail(RB_ERR_INVALID_ARGUMENT, "out is null");
  return guarded([&] { *out = new rb_config{}; });
}

void rb_config_free(rb_config* config) { delete config; }

rb_status rb_config_set_algorithm(rb_config* config, rb_algorithm a) {
  if (!config) return fail(RB_ERR_INVALID_ARGUMENT, "config is null");
  switch (a) {
    case RB_ALG_RWM: config->config.algorithm = Algorithm::RWM; return RB_OK;
    case RB_ALG_MALA: config->config.algorithm = Algorithm::MALA; return RB_OK;
    case RB_ALG_SMMALA: config->config.algorithm = Algorithm::SMMALA; return RB_OK;
  }
  return fail(RB_ERR_INVALID_ARGUMENT, "unknown algorithm");
}

rb_status rb_config_set_step_size(rb_config* config, double h) {
  if (!config || !(h > 0)) return fail(RB_ERR_INVALID_ARGUMENT, "h must be positive");
  config->config.h = h;
  return RB_OK;
}

rb_status rb_config_set_alpha(rb_config* config, double alpha) {
  if (!config || !(alpha > 0))
    return fail(RB_ERR_INVALID_ARGUMENT, "alpha must be positive");
  config->config.alpha = alpha;
  return RB_OK;
}

rb_status rb_config_set_steps(rb_config* config, long n_steps) {
  if (!config || n_steps < 1)
    return fail(RB_ERR_INVALID_ARGUMENT, "n_steps must be >= 1");
  config->config.n_steps = n_steps;
  return RB_OK;
}

rb_status rb_config_set_warmup(rb_config* config, long warmup) {
  if (!config || warmup < 0)
    return fail(RB_ERR_INVALID_ARGUMENT, "warmup must be >= 0");
  config->config.warmup = warmup;
  return RB_OK;
}

rb_status rb_config_set_target_accept(rb_config* config, double rate) {
  if (!config || !(rate > 0 && rate < 1))
    return fail(RB_ERR_INVALID_ARGUMENT, "target_accept must lie in (0,1)");
  config->config.target_accept = rate;
  return RB_OK;
}

rb_status rb_config_set_thin(rb_config* config, long thin) {
  if (!config || thin < 1)
    return fail(RB_ERR_INVALID_ARGUMENT, "thin must be >= 1");
  config->config.thin = thin;
  return RB_OK;
}

rb_status rb_config_set_init(rb_config* config, const double* x, int n) {
  if (!config || !x || n < 1)
    return fail(RB_ERR_INVALID_ARGUMENT, "invalid init state");
  config->config.init = Eigen::Map<const Eigen::VectorXd>(x, n);
  return RB_OK;
}

rb_status rb_config_set_regularization(rb_config* config,
                                       rb_regularization mode) {
  if (!config) return fail(RB_ERR_INVALID_ARGUMENT, "config is null");
  config->config.regularization = mode == RB_REG_ABS_EIGEN_SCALE
                                      ? MetricRegularization::AbsEigenScale
                                      : MetricRegularization::AbsEigenFloor;
  return RB_OK;
}

rb_status rb_run_chain(const rb_model* model, const rb_config* config,
                       uint64_t seed, uint64_t stream_id, rb_chain** out) {
  if (!model || !config || !out)
    return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new rb_chain{
        run_chain(model->model, config->config, RngStream(seed, stream_id))};
  });
}

void rb_chain_free(rb_chain* chain) { delete chain; }

long rb_chain_rows(const rb_chain* chain) {
  return chain ? static_cast<long>(chain->chain.states.rows()) : 0;
}

int rb_chain_cols(const rb_chain* chain) {
  return chain ? static_cast<int>(chain->chain.states.cols()) : 0;
}

const double* rb_chain_data(const rb_chain* chain) {
  return chain ? chain->chain.states.data() : nullptr;
}

double rb_chain_acceptance_rate(const rb_chain* chain) {
  return chain ? chain->chain.acceptance_rate() : 0.0;
}

double rb_chain_tuned_step(const rb_chain* chain) {
  return chain ? chain->chain.tuned_h : 0.0;
}

long rb_chain_divergences(const rb_chain* chain) {
  return chain ? chain->chain.divergences : 0;
}

rb_status rb_chain_write_csv(const rb_chain* chain, const rb_model* model,
                             const char* path) {
  if (!chain || !model || !path)
    return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { write_csv(chain->chain, model->model, path); });
}

rb_status rb_chain_write_binary(const rb_chain* chain, const char* path) {
  if (!chain || !path) return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { write_binary(chain->chain, path); });
}

rb_status rb_chain_meta_json(const rb_chain* chain, char** json_out) {
  if (!chain || !json_out) return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *json_out = dup_string(chain_meta_json(chain->chain)); });
}

/* ---- diagnostics ------------------------------------------------------ */

rb_status rb_integrated_autocorrelation(const double* series, long n,
                                        double* tau_out, long* lag_out) {
  if (!series || !tau_out) return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const IatResult r = integrated_autocorrelation(
        std::span<const double>(series, static_cast<std::size_t>(n)));
    *tau_out = r.tau;
    if (lag_out) *lag_out = r.truncation_lag;
  });
}

rb_status rb_chain_iat(const rb_chain* chain, double* tau_out, long* lag_out,
                       double* tau_max_out) {
  if (!chain || !tau_out || !tau_max_out)
    return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const IatReport r = iat_report(chain->chain);
    for (std::size_t c = 0; c < r.tau_per_component.size(); ++c) {
      tau_out[c] = r.tau_per_component[c];
      if (lag_out) lag_out[c] = r.truncation_lag_per_component[c];
    }
    *tau_max_out = r.tau_max;
  });
}

rb_status rb_quantiles(const double* sample, long n, const double* probs,
                       int n_probs, double* out) {
  if (!sample || !probs || !out)
    return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto q = empirical_quantiles(
        std::span<const double>(sample, static_cast<std::size_t>(n)),
        std::span<const double>(probs, static_cast<std::size_t>(n_probs)));
    for (std::size_t k = 0; k < q.size(); ++k) out[k] = q[k];
  });
}

rb_status rb_ks_two_sample(const double* a, long na, const double* b, long nb,
                           double tau_a, double tau_b, double* stat_out,
                           int* reject_out) {
  if (!a || !b || !stat_out) return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const KsResult r = ks_two_sample(
        std::span<const double>(a, static_cast<std::size_t>(na)),
        std::span<const double>(b, static_cast<std::size_t>(nb)), tau_a, tau_b);
    *stat_out = r.statistic;
    if (reject_out) *reject_out = r.reject_at_1pct ? 1 : 0;
  });
}

rb_status rb_chain_report_json(const rb_chain* chain, const rb_model* model,
                               const double* ks_stats, const int* ks_reject,
                               int n_ks, char** json_out) {
  if (!chain || !model || !json_out)
    return fail(RB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    RunReport report = make_run_report(chain->chain);
    if (ks_stats && n_ks > 0) {
      report.ks_per_component =
          std::vector<double>(ks_stats, ks_stats + n_ks);
    }
    if (ks_reject && n_ks > 0) {
      std::vector<bool> rej(static_cast<std::size_t>(n_ks));
      for (int i = 0; i < n_ks; ++i) rej[static_cast<std::size_t>(i)] = ks_reject[i] != 0;
      report.ks_reject_per_component = std::move(rej);
    }
    *json_out =
        dup_string(run_report_json(report, model->model.component_names()));
  });
}

}  // extern "C"
