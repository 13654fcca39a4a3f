/* rosenbench: Rosenbrock-family benchmark densities for MCMC testing.
 *
 * C interface to the shared library. All objects are opaque handles created
 * and destroyed through these functions; every fallible call returns an
 * rb_status and writes its result through out parameters. rb_last_error()
 * returns a thread-local message for the most recent failure on the calling
 * thread.
 *
 * Model families:
 *   twod    2-d kernel exp{-a(x1-mu)^2 - b(x2-x1^2)^2}
 *   full    chained n-d kernel (no closed-form constant, not decomposable)
 *   even    product of independent 2-d kernels
 *   hybrid  block-structured n-d kernel, n = (n1-1)*n2 + 1, with closed-form
 *           constant and exact ancestral sampling
 */

#ifndef ROSENBENCH_H
#define ROSENBENCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RB_API __declspec(dllexport)
#else
#define RB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rb_status {
  RB_OK = 0,
  RB_ERR_INVALID_ARGUMENT = 1,
  RB_ERR_DIMENSION_MISMATCH = 2,
  RB_ERR_NONFINITE_INPUT = 3,
  RB_ERR_NOT_AVAILABLE = 4,
  RB_ERR_NUMERICAL = 5,
  RB_ERR_IO = 6,
  RB_ERR_PARSE = 7
} rb_status;

typedef enum rb_algorithm {
  RB_ALG_RWM = 0,
  RB_ALG_MALA = 1,
  RB_ALG_SMMALA = 2
} rb_algorithm;

typedef enum rb_regularization {
  RB_REG_ABS_EIGEN_FLOOR = 0,
  RB_REG_ABS_EIGEN_SCALE = 1
} rb_regularization;

typedef struct rb_model rb_model;
typedef struct rb_batch rb_batch;
typedef struct rb_config rb_config;
typedef struct rb_chain rb_chain;

RB_API const char* rb_version(void);
RB_API const char* rb_status_name(rb_status status);

/* Thread-local message describing the last error on this thread. */
RB_API const char* rb_last_error(void);

/* Frees strings returned through char** out parameters. */
RB_API void rb_string_free(char* s);

/* ---- models ---------------------------------------------------------- */

RB_API rb_status rb_model_twod(double mu, double a, double b, rb_model** out);
RB_API rb_status rb_model_full(int n, double scale, double quad_coeff,
                               double mu, rb_model** out);
/* mus has n/2 entries, one per pair. */
RB_API rb_status rb_model_even(int n, const double* mus, double scale,
                               double quad_coeff, rb_model** out);
/* b is row-major n2 x (n1-1): b[(j-1)*(n1-1) + (i-2)] = b_{j,i}. */
RB_API rb_status rb_model_hybrid(double mu, double a, const double* b, int n1,
                                 int n2, rb_model** out);
RB_API rb_status rb_model_from_json(const char* json_text, rb_model** out);
RB_API rb_status rb_model_to_json(const rb_model* model, char** json_out);
RB_API void rb_model_free(rb_model* model);

RB_API int rb_model_dim(const rb_model* model);
/* "twod", "full", "even" or "hybrid". */
RB_API const char* rb_model_family(const rb_model* model);
/* Component label for CSV columns; returns NULL for an out-of-range index. */
RB_API const char* rb_model_component_name(const rb_model* model, int index);

RB_API rb_status rb_log_kernel(const rb_model* model, const double* x, int n,
                               double* out);
RB_API rb_status rb_grad_log_kernel(const rb_model* model, const double* x,
                                    int n, double* grad_out);
/* hess_out is row-major n x n. */
RB_API rb_status rb_hessian_log_kernel(const rb_model* model, const double* x,
                                       int n, double* hess_out);
/* RB_ERR_NOT_AVAILABLE for the full and even families. */
RB_API rb_status rb_log_norm_constant(const rb_model* model, double* out);

/* Ancestral factorization. parent < 0 marks the root factor N(mu, 1/(2
 * coeff)); other factors are N(x_parent^2, 1/(2 coeff)). Factors come in
 * topological order. Count is -1 for non-decomposable models. */
typedef struct rb_factor {
  int index;
  int parent;
  double coeff;
  double mu;
  double variance;
} rb_factor;

RB_API int rb_model_factor_count(const rb_model* model);
RB_API rb_status rb_model_factor(const rb_model* model, int k, rb_factor* out);

/* Conditional mean/variance of x2 | x1 with x3 marginalized out of the 3-d
 * full kernel. Errors unless the model is full with n = 3. */
RB_API rb_status rb_full3d_conditional_x2(const rb_model* model, double x1,
                                          double* mean, double* variance);

/* ---- exact sampling --------------------------------------------------- */

RB_API rb_status rb_sample_exact(const rb_model* model, long n_samples,
                                 uint64_t seed, uint64_t stream_id,
                                 rb_batch** out);
RB_API void rb_batch_free(rb_batch* batch);
RB_API long rb_batch_rows(const rb_batch* batch);
RB_API int rb_batch_cols(const rb_batch* batch);
/* Row-major n_samples x dim block, owned by the batch. */
RB_API const double* rb_batch_data(const rb_batch* batch);
/* Name of the Gaussian generation method baked into this build. */
RB_API const char* rb_batch_gaussian_method(const rb_batch* batch);

RB_API rb_status rb_batch_write_csv(const rb_batch* batch, const char* path);
RB_API rb_status rb_batch_write_binary(const rb_batch* batch, const char* path);
/* Reads the raw matrix container back; rows/cols/data accessors apply,
 * model-dependent calls do not. */
RB_API rb_status rb_batch_read_binary(const char* path, rb_batch** out);

/* Standardized per-factor residual statistics of a batch. */
typedef struct rb_factor_stats {
  int index;
  int parent;
  long n;
  double mean;
  double variance;
  double skewness;
  int variance_defined;
  int skewness_defined;
} rb_factor_stats;

/* stats must have room for rb_model_factor_count entries. */
RB_API rb_status rb_batch_residual_stats(const rb_batch* batch,
                                         rb_factor_stats* stats, int capacity,
                                         int* count);

/* ---- samplers --------------------------------------------------------- */

RB_API rb_status rb_config_new(rb_config** out);
RB_API void rb_config_free(rb_config* config);
RB_API rb_status rb_config_set_algorithm(rb_config* config, rb_algorithm a);
RB_API rb_status rb_config_set_step_size(rb_config* config, double h);
RB_API rb_status rb_config_set_alpha(rb_config* config, double alpha);
RB_API rb_status rb_config_set_steps(rb_config* config, long n_steps);
RB_API rb_status rb_config_set_warmup(rb_config* config, long warmup);
RB_API rb_status rb_config_set_target_accept(rb_config* config, double rate);
RB_API rb_status rb_config_set_thin(rb_config* config, long thin);
RB_API rb_status rb_config_set_init(rb_config* config, const double* x, int n);
RB_API rb_status rb_config_set_regularization(rb_config* config,
                                              rb_regularization mode);

RB_API rb_status rb_run_chain(const rb_model* model, const rb_config* config,
                              uint64_t seed, uint64_t stream_id,
                              rb_chain** out);
RB_API void rb_chain_free(rb_chain* chain);
RB_API long rb_chain_rows(const rb_chain* chain);
RB_API int rb_chain_cols(const rb_chain* chain);
/* Row-major kept-states block, owned by the chain. */
RB_API const double* rb_chain_data(const rb_chain* chain);
RB_API double rb_chain_acceptance_rate(const rb_chain* chain);
RB_API double rb_chain_tuned_step(const rb_chain* chain);
RB_API long rb_chain_divergences(const rb_chain* chain);

RB_API rb_status rb_chain_write_csv(const rb_chain* chain,
                                    const rb_model* model, const char* path);
RB_API rb_status rb_chain_write_binary(const rb_chain* chain, const char* path);
/* JSON sidecar: tuned_h, acceptance_rate, divergences, config, seed. */
RB_API rb_status rb_chain_meta_json(const rb_chain* chain, char** json_out);

/* ---- diagnostics ------------------------------------------------------ */

/* tau = 1 + 2 sum rho(l) with initial-positive-sequence truncation; lag_out
 * (optional) receives the truncation lag. Series needs >= 100 points. */
RB_API rb_status rb_integrated_autocorrelation(const double* series, long n,
                                               double* tau_out, long* lag_out);

/* Per-component tau of a chain's kept states plus the max over components.
 * tau_out has dim entries; lag_out may be NULL. */
RB_API rb_status rb_chain_iat(const rb_chain* chain, double* tau_out,
                              long* lag_out, double* tau_max_out);

/* Type-7 empirical quantiles of sample at each prob in (0,1). */
RB_API rb_status rb_quantiles(const double* sample, long n,
                              const double* probs, int n_probs, double* out);

/* Two-sample KS with optional autocorrelation deflation (pass tau = 1 for
 * independent samples). reject_out gets the 1%-level decision. */
RB_API rb_status rb_ks_two_sample(const double* a, long na, const double* b,
                                  long nb, double tau_a, double tau_b,
                                  double* stat_out, int* reject_out);

/* Consolidated run report (moments, tau, acceptance, divergences, optional
 * per-component KS columns) as JSON. ks_stats/ks_reject may be NULL. */
RB_API rb_status rb_chain_report_json(const rb_chain* chain,
                                      const rb_model* model,
                                      const double* ks_stats,
                                      const int* ks_reject, int n_ks,
                                      char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* ROSENBENCH_H */
