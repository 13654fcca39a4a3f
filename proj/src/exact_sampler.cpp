#include "exact_sampler.hpp"

#include <cmath>

#include "io_util.hpp"

namespace rosenbench {

SampleBatch sample_exact(const Model& model, long n_samples, RngStream rng) {
  if (!model.decomposable())
    raise(ErrorCode::NotAvailable,
          "exact sampling needs a decomposable model (twod, even or hybrid)");
  if (n_samples < 1)
    raise(ErrorCode::InvalidArgument, "n_samples must be >= 1");

  const auto& factors = model.conditional_decomposition();
  const int dim = model.dim();

  SampleBatch batch{model, rng.seed(), rng.stream_id(),
                    RngStream::kNormalMethod, RowMatrixXd()};
  batch.draws.resize(n_samples, dim);

  std::vector<double> sd(factors.size());
  for (std::size_t k = 0; k < factors.size(); ++k)
    sd[k] = std::sqrt(factors[k].variance());

  for (long s = 0; s < n_samples; ++s) {
    auto row = batch.draws.row(s);
    for (std::size_t k = 0; k < factors.size(); ++k) {
      const auto& f = factors[k];
      const double mean = f.parent < 0 ? f.mu : f.mean(row[f.parent]);
      row[f.index] = mean + sd[k] * rng.normal();
    }
  }
  return batch;
}

std::vector<FactorStats> conditional_moment_check(const SampleBatch& batch) {
  const auto& factors = batch.model.conditional_decomposition();
  const long n = batch.draws.rows();

  std::vector<FactorStats> stats(factors.size());
  std::vector<double> residual(static_cast<std::size_t>(n));

  for (std::size_t k = 0; k < factors.size(); ++k) {
    const auto& f = factors[k];
    const double inv_sd = 1.0 / std::sqrt(f.variance());
    double sum = 0.0;
    for (long s = 0; s < n; ++s) {
      const double mean =
          f.parent < 0 ? f.mu : f.mean(batch.draws(s, f.parent));
      const double r = (batch.draws(s, f.index) - mean) * inv_sd;
      residual[static_cast<std::size_t>(s)] = r;
      sum += r;
    }
    FactorStats& st = stats[k];
    st.index = f.index;
    st.parent = f.parent;
    st.n = n;
    st.mean = sum / static_cast<double>(n);
    if (n >= 2) {
      double m2 = 0.0, m3 = 0.0;
      for (long s = 0; s < n; ++s) {
        const double d = residual[static_cast<std::size_t>(s)] - st.mean;
        m2 += d * d;
        m3 += d * d * d;
      }
      m2 /= static_cast<double>(n);
      m3 /= static_cast<double>(n);
      st.variance = m2 * static_cast<double>(n) / static_cast<double>(n - 1);
      st.variance_defined = true;
      if (n >= 3 && m2 > 0.0) {
        st.skewness = m3 / std::pow(m2, 1.5);
        st.skewness_defined = true;
      }
    }
  }
  return stats;
}

void write_csv(const SampleBatch& batch, const std::string& path) {
  write_matrix_csv(batch.draws, batch.model.component_names(), path);
}

void write_binary(const SampleBatch& batch, const std::string& path) {
  write_matrix_binary(batch.draws, path);
}

}  // namespace rosenbench
