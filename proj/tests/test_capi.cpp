#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "rosenbench.h"

namespace {

struct ModelHandle {
  rb_model* ptr = nullptr;
  ~ModelHandle() { rb_model_free(ptr); }
};

rb_model* make_standard_hybrid() {
  const std::vector<double> b(4, 5.0);
  rb_model* m = nullptr;
  REQUIRE(rb_model_hybrid(1.0, 0.05, b.data(), 3, 2, &m) == RB_OK);
  return m;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("model construction, dimensions and families") {
  ModelHandle hyb{make_standard_hybrid()};
  CHECK(rb_model_dim(hyb.ptr) == 5);
  CHECK(std::string(rb_model_family(hyb.ptr)) == "hybrid");
  CHECK(std::string(rb_model_component_name(hyb.ptr, 1)) == "x_1_2");
  CHECK(rb_model_component_name(hyb.ptr, 5) == nullptr);

  rb_model* bad = nullptr;
  CHECK(rb_model_twod(1.0, -1.0, 5.0, &bad) == RB_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(rb_last_error()) > 0);

  const double mus[2] = {1.0, 1.0};
  rb_model* even = nullptr;
  REQUIRE(rb_model_even(4, mus, 0.05, 100.0, &even) == RB_OK);
  CHECK(rb_model_dim(even) == 4);
  rb_model_free(even);
}

TEST_CASE("kernel evaluation and error codes") {
  ModelHandle hyb{make_standard_hybrid()};
  const std::vector<double> ones(5, 1.0);
  double lk = 1.0;
  REQUIRE(rb_log_kernel(hyb.ptr, ones.data(), 5, &lk) == RB_OK);
  CHECK(lk == doctest::Approx(0.0));

  CHECK(rb_log_kernel(hyb.ptr, ones.data(), 4, &lk) == RB_ERR_DIMENSION_MISMATCH);
  std::vector<double> nan_point = ones;
  nan_point[2] = std::nan("");
  CHECK(rb_log_kernel(hyb.ptr, nan_point.data(), 5, &lk) == RB_ERR_NONFINITE_INPUT);
  CHECK(rb_log_kernel(nullptr, ones.data(), 5, &lk) == RB_ERR_INVALID_ARGUMENT);

  std::vector<double> grad(5);
  REQUIRE(rb_grad_log_kernel(hyb.ptr, ones.data(), 5, grad.data()) == RB_OK);
  for (double g : grad) CHECK(g == doctest::Approx(0.0));

  std::vector<double> hess(25);
  REQUIRE(rb_hessian_log_kernel(hyb.ptr, ones.data(), 5, hess.data()) == RB_OK);
  // -2a plus two root-child couplings of -8b each at the ones vector
  CHECK(hess[0] == doctest::Approx(-80.1));
}

TEST_CASE("normalizing constants through the C surface") {
  rb_model* twod = nullptr;
  REQUIRE(rb_model_twod(1.0, 0.05, 5.0, &twod) == RB_OK);
  double lc = 0.0;
  REQUIRE(rb_log_norm_constant(twod, &lc) == RB_OK);
  CHECK(lc == doctest::Approx(std::log(0.5 / M_PI)).epsilon(1e-14));
  rb_model_free(twod);

  rb_model* full = nullptr;
  REQUIRE(rb_model_full(3, 0.05, 100.0, 1.0, &full) == RB_OK);
  CHECK(rb_log_norm_constant(full, &lc) == RB_ERR_NOT_AVAILABLE);
  CHECK(rb_model_factor_count(full) == -1);
  rb_model_free(full);
}

TEST_CASE("factor iteration matches the ancestral structure") {
  ModelHandle hyb{make_standard_hybrid()};
  const int count = rb_model_factor_count(hyb.ptr);
  REQUIRE(count == 5);
  rb_factor f{};
  REQUIRE(rb_model_factor(hyb.ptr, 0, &f) == RB_OK);
  CHECK(f.parent == -1);
  CHECK(f.mu == 1.0);
  CHECK(f.variance == doctest::Approx(10.0));
  int from_root = 0;
  for (int k = 1; k < count; ++k) {
    REQUIRE(rb_model_factor(hyb.ptr, k, &f) == RB_OK);
    CHECK(f.variance == doctest::Approx(0.1));
    from_root += f.parent == 0;
  }
  CHECK(from_root == 2);
  CHECK(rb_model_factor(hyb.ptr, 7, &f) == RB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("full 3-d conditional through the C surface") {
  rb_model* full = nullptr;
  REQUIRE(rb_model_full(3, 5.0, 1.0, 1.0, &full) == RB_OK);  // b = c = 5
  double mean = 0.0, var = 0.0;
  REQUIRE(rb_full3d_conditional_x2(full, 1.0, &mean, &var) == RB_OK);
  CHECK(var == doctest::Approx(0.05));
  CHECK(mean == doctest::Approx(1.0));
  rb_model_free(full);

  rb_model* full4 = nullptr;
  REQUIRE(rb_model_full(4, 0.05, 100.0, 1.0, &full4) == RB_OK);
  CHECK(rb_full3d_conditional_x2(full4, 1.0, &mean, &var) ==
        RB_ERR_INVALID_ARGUMENT);
  rb_model_free(full4);
}

TEST_CASE("json round trip through the C surface") {
  ModelHandle hyb{make_standard_hybrid()};
  char* text = nullptr;
  REQUIRE(rb_model_to_json(hyb.ptr, &text) == RB_OK);
  rb_model* back = nullptr;
  REQUIRE(rb_model_from_json(text, &back) == RB_OK);
  char* text2 = nullptr;
  REQUIRE(rb_model_to_json(back, &text2) == RB_OK);
  CHECK(std::string(text) == std::string(text2));
  rb_string_free(text);
  rb_string_free(text2);
  rb_model_free(back);

  CHECK(rb_model_from_json("{\"family\":\"what\"}", &back) == RB_ERR_PARSE);
}

TEST_CASE("exact sampling is deterministic and decomposable-only") {
  ModelHandle hyb{make_standard_hybrid()};
  rb_batch* a = nullptr;
  rb_batch* b = nullptr;
  REQUIRE(rb_sample_exact(hyb.ptr, 400, 99, 1, &a) == RB_OK);
  REQUIRE(rb_sample_exact(hyb.ptr, 400, 99, 1, &b) == RB_OK);
  REQUIRE(rb_batch_rows(a) == 400);
  REQUIRE(rb_batch_cols(a) == 5);
  CHECK(std::memcmp(rb_batch_data(a), rb_batch_data(b),
                    sizeof(double) * 400 * 5) == 0);
  CHECK(std::string(rb_batch_gaussian_method(a)) == "marsaglia-polar");
  rb_batch_free(b);

  rb_model* full = nullptr;
  REQUIRE(rb_model_full(3, 0.05, 100.0, 1.0, &full) == RB_OK);
  rb_batch* none = nullptr;
  CHECK(rb_sample_exact(full, 10, 1, 0, &none) == RB_ERR_NOT_AVAILABLE);
  CHECK(rb_sample_exact(hyb.ptr, 0, 1, 0, &none) == RB_ERR_INVALID_ARGUMENT);
  rb_model_free(full);

  // binary round trip
  const auto path = temp_file("rb_capi_batch.bin");
  REQUIRE(rb_batch_write_binary(a, path.string().c_str()) == RB_OK);
  rb_batch* loaded = nullptr;
  REQUIRE(rb_batch_read_binary(path.string().c_str(), &loaded) == RB_OK);
  CHECK(rb_batch_rows(loaded) == 400);
  CHECK(std::memcmp(rb_batch_data(a), rb_batch_data(loaded),
                    sizeof(double) * 400 * 5) == 0);
  CHECK(rb_batch_write_csv(loaded, path.string().c_str()) == RB_ERR_NOT_AVAILABLE);
  rb_batch_free(loaded);
  rb_batch_free(a);
  std::filesystem::remove(path);
}

TEST_CASE("residual statistics through the C surface") {
  ModelHandle hyb{make_standard_hybrid()};
  rb_batch* batch = nullptr;
  REQUIRE(rb_sample_exact(hyb.ptr, 50000, 7, 0, &batch) == RB_OK);
  rb_factor_stats stats[5];
  int count = 0;
  REQUIRE(rb_batch_residual_stats(batch, stats, 5, &count) == RB_OK);
  REQUIRE(count == 5);
  for (int k = 0; k < count; ++k) {
    CHECK(stats[k].variance_defined == 1);
    CHECK(std::abs(stats[k].mean) < 0.03);
    CHECK(std::abs(stats[k].variance - 1.0) < 0.03);
  }
  CHECK(rb_batch_residual_stats(batch, stats, 2, &count) ==
        RB_ERR_INVALID_ARGUMENT);
  rb_batch_free(batch);
}

TEST_CASE("chains through the C surface") {
  ModelHandle hyb{make_standard_hybrid()};
  rb_config* cfg = nullptr;
  REQUIRE(rb_config_new(&cfg) == RB_OK);
  REQUIRE(rb_config_set_algorithm(cfg, RB_ALG_SMMALA) == RB_OK);
  REQUIRE(rb_config_set_steps(cfg, 4000) == RB_OK);
  REQUIRE(rb_config_set_warmup(cfg, 2000) == RB_OK);
  REQUIRE(rb_config_set_thin(cfg, 4) == RB_OK);
  REQUIRE(rb_config_set_alpha(cfg, 1e6) == RB_OK);
  CHECK(rb_config_set_step_size(cfg, -1.0) == RB_ERR_INVALID_ARGUMENT);
  CHECK(rb_config_set_target_accept(cfg, 1.5) == RB_ERR_INVALID_ARGUMENT);

  rb_chain* a = nullptr;
  rb_chain* b = nullptr;
  REQUIRE(rb_run_chain(hyb.ptr, cfg, 17, 4, &a) == RB_OK);
  REQUIRE(rb_run_chain(hyb.ptr, cfg, 17, 4, &b) == RB_OK);
  REQUIRE(rb_chain_rows(a) == 1000);
  REQUIRE(rb_chain_cols(a) == 5);
  CHECK(std::memcmp(rb_chain_data(a), rb_chain_data(b),
                    sizeof(double) * 1000 * 5) == 0);
  CHECK(rb_chain_acceptance_rate(a) == rb_chain_acceptance_rate(b));
  CHECK(rb_chain_tuned_step(a) > 0.0);
  CHECK(rb_chain_divergences(a) >= 0);
  rb_chain_free(b);

  char* meta = nullptr;
  REQUIRE(rb_chain_meta_json(a, &meta) == RB_OK);
  CHECK(std::string(meta).find("tuned_h") != std::string::npos);
  rb_string_free(meta);

  double tau[5];
  double tau_max = 0.0;
  REQUIRE(rb_chain_iat(a, tau, nullptr, &tau_max) == RB_OK);
  for (double t : tau) CHECK(t >= 1.0);
  CHECK(tau_max >= *std::max_element(tau, tau + 5) - 1e-12);

  char* report = nullptr;
  const double ks_stats[5] = {0.01, 0.01, 0.01, 0.01, 0.01};
  const int ks_reject[5] = {0, 0, 0, 0, 0};
  REQUIRE(rb_chain_report_json(a, hyb.ptr, ks_stats, ks_reject, 5, &report) == RB_OK);
  CHECK(std::string(report).find("ks_statistic") != std::string::npos);
  rb_string_free(report);

  const auto csv = temp_file("rb_capi_chain.csv");
  REQUIRE(rb_chain_write_csv(a, hyb.ptr, csv.string().c_str()) == RB_OK);
  CHECK(std::filesystem::file_size(csv) > 0);
  std::filesystem::remove(csv);

  rb_chain_free(a);
  rb_config_free(cfg);
}

TEST_CASE("diagnostics primitives through the C surface") {
  std::vector<double> series(5000);
  for (std::size_t t = 0; t < series.size(); ++t)
    series[t] = std::sin(0.001 * static_cast<double>(t) * static_cast<double>(t));
  double tau = 0.0;
  long lag = -1;
  REQUIRE(rb_integrated_autocorrelation(series.data(),
                                        static_cast<long>(series.size()), &tau,
                                        &lag) == RB_OK);
  CHECK(tau > 0.0);
  CHECK(lag >= 0);
  CHECK(rb_integrated_autocorrelation(series.data(), 10, &tau, &lag) ==
        RB_ERR_INVALID_ARGUMENT);

  const double probs[3] = {0.25, 0.5, 0.75};
  double q[3];
  const double sample[5] = {5.0, 1.0, 3.0, 2.0, 4.0};
  REQUIRE(rb_quantiles(sample, 5, probs, 3, q) == RB_OK);
  CHECK(q[1] == doctest::Approx(3.0));

  double stat = 0.0;
  int reject = -1;
  REQUIRE(rb_ks_two_sample(sample, 5, sample, 5, 1.0, 1.0, &stat, &reject) == RB_OK);
  CHECK(stat == 0.0);
  CHECK(reject == 0);
}

TEST_CASE("library identifies itself") {
  CHECK(std::string(rb_version()) == "0.1.0");
  CHECK(std::string(rb_status_name(RB_ERR_NOT_AVAILABLE)) == "not-available");
}
