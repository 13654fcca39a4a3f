#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "model.hpp"
#include "rng.hpp"

namespace rosenbench {

// I.i.d. draws from a decomposable model, one sample per row.
struct SampleBatch {
  Model model;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::string gaussian_method;
  RowMatrixXd draws;  // n_samples x dim, sample-major
};

// Ancestral sampling: x1 ~ N(mu, 1/2a), then each x_{j,i} ~ N(x_{j,i-1}^2,
// 1/(2 b_{j,i})) in topological order, outer loop over samples. Identical
// (model, seed, stream, n) reproduce the batch bit for bit.
SampleBatch sample_exact(const Model& model, long n_samples, RngStream rng);

// Standardized residual statistics per conditional factor. Under a correct
// sampler each factor's residuals (x_child - mean(parent)) / sd are standard
// normal, so mean ~ 0, variance ~ 1, skewness ~ 0.
struct FactorStats {
  int index = 0;
  int parent = -1;
  long n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  bool variance_defined = false;  // needs n >= 2
  bool skewness_defined = false;  // needs n >= 3 and nonzero variance
};

std::vector<FactorStats> conditional_moment_check(const SampleBatch& batch);

void write_csv(const SampleBatch& batch, const std::string& path);
void write_binary(const SampleBatch& batch, const std::string& path);

}  // namespace rosenbench
