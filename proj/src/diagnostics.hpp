#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "model.hpp"

namespace rosenbench {

struct Chain;  // mcmc.hpp

// Integrated autocorrelation time tau = 1 + 2 sum_{l=1..L} rho(l), with the
// sample ACF under 1/N normalization and L truncated just before the first
// lag whose autocorrelation drops to <= 0 (initial-positive-sequence rule).
struct IatResult {
  double tau = 1.0;
  long truncation_lag = 0;
};

IatResult integrated_autocorrelation(std::span<const double> series);

// Per-component tau plus the max-over-components summary.
struct IatReport {
  std::vector<double> tau_per_component;
  std::vector<long> truncation_lag_per_component;
  double tau_max = 1.0;
};

IatReport iat_report(const RowMatrixXd& states);
IatReport iat_report(const Chain& chain);

// Empirical quantiles with linear interpolation between order statistics
// (type-7 convention). probs must lie in (0, 1).
std::vector<double> empirical_quantiles(std::span<const double> sample,
                                        std::span<const double> probs);

struct QuantileTable {
  int component = 0;
  std::vector<double> probs;
  std::vector<double> quantiles_a;
  std::vector<double> quantiles_b;
};

QuantileTable quantile_table(std::span<const double> sample_a,
                             std::span<const double> sample_b,
                             std::span<const double> probs, int component = 0);

void write_quantile_csv(const QuantileTable& table, const std::string& path);

// Two-sample Kolmogorov-Smirnov. tau arguments deflate the effective sample
// sizes (n_eff = n / tau) so autocorrelated inputs are judged against the
// information they actually carry; deflated is set when either tau > 1.
struct KsResult {
  double statistic = 0.0;
  bool reject_at_1pct = false;
  double n_eff_a = 0.0;
  double n_eff_b = 0.0;
  bool deflated = false;
};

KsResult ks_two_sample(std::span<const double> sample_a,
                       std::span<const double> sample_b, double tau_a = 1.0,
                       double tau_b = 1.0);

struct ComponentMoments {
  double mean = 0.0;
  double variance = 0.0;
};

struct RunReport {
  IatReport iat;
  double acceptance_rate = 0.0;
  double tuned_h = 0.0;
  long divergences = 0;
  std::vector<ComponentMoments> moments;
  std::optional<std::vector<double>> ks_per_component;
  std::optional<std::vector<bool>> ks_reject_per_component;
};

RunReport make_run_report(const Chain& chain);

std::string run_report_json(const RunReport& report,
                            const std::vector<std::string>& component_names);

}  // namespace rosenbench
