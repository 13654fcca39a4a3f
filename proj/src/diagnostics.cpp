#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "io_util.hpp"
#include "mcmc.hpp"

namespace rosenbench {

IatResult integrated_autocorrelation(std::span<const double> series) {
  const long n = static_cast<long>(series.size());
  if (n < 100)
    raise(ErrorCode::InvalidArgument,
          "integrated autocorrelation needs at least 100 points");

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);

  std::vector<double> d(series.size());
  double c0 = 0.0;
  for (long t = 0; t < n; ++t) {
    d[static_cast<std::size_t>(t)] = series[static_cast<std::size_t>(t)] - mean;
    c0 += d[static_cast<std::size_t>(t)] * d[static_cast<std::size_t>(t)];
  }
  c0 /= static_cast<double>(n);
  // Relative floor absorbs the rounding dust a constant series leaves behind.
  if (!std::isfinite(c0) || c0 <= 1e-24 * std::max(1.0, mean * mean))
    raise(ErrorCode::Numerical, "series has zero or non-finite variance");

  IatResult out;
  for (long l = 1; l < n; ++l) {
    double cl = 0.0;
    for (long t = 0; t + l < n; ++t)
      cl += d[static_cast<std::size_t>(t)] * d[static_cast<std::size_t>(t + l)];
    cl /= static_cast<double>(n);
    const double rho = cl / c0;
    if (rho <= 0.0) break;
    out.tau += 2.0 * rho;
    out.truncation_lag = l;
  }
  return out;
}

IatReport iat_report(const RowMatrixXd& states) {
  const Eigen::Index dim = states.cols();
  IatReport report;
  report.tau_per_component.resize(static_cast<std::size_t>(dim));
  report.truncation_lag_per_component.resize(static_cast<std::size_t>(dim));
  std::vector<double> column(static_cast<std::size_t>(states.rows()));
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < states.rows(); ++r)
      column[static_cast<std::size_t>(r)] = states(r, c);
    const IatResult res = integrated_autocorrelation(column);
    report.tau_per_component[static_cast<std::size_t>(c)] = res.tau;
    report.truncation_lag_per_component[static_cast<std::size_t>(c)] =
        res.truncation_lag;
  }
  report.tau_max = *std::max_element(report.tau_per_component.begin(),
                                     report.tau_per_component.end());
  return report;
}

IatReport iat_report(const Chain& chain) { return iat_report(chain.states); }

std::vector<double> empirical_quantiles(std::span<const double> sample,
                                        std::span<const double> probs) {
  if (sample.empty())
    raise(ErrorCode::InvalidArgument, "quantiles of an empty sample");
  for (double p : probs)
    if (!(p > 0.0 && p < 1.0))
      raise(ErrorCode::InvalidArgument, "quantile probs must lie in (0,1)");

  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  std::vector<double> out(probs.size());
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const double h = static_cast<double>(n - 1) * probs[k];
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    out[k] = lo + 1 < n ? sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
                        : sorted[n - 1];
  }
  return out;
}

QuantileTable quantile_table(std::span<const double> sample_a,
                             std::span<const double> sample_b,
                             std::span<const double> probs, int component) {
  for (std::size_t k = 1; k < probs.size(); ++k)
    if (!(probs[k] > probs[k - 1]))
      raise(ErrorCode::InvalidArgument, "probs must be strictly increasing");
  QuantileTable table;
  table.component = component;
  table.probs.assign(probs.begin(), probs.end());
  table.quantiles_a = empirical_quantiles(sample_a, probs);
  table.quantiles_b = empirical_quantiles(sample_b, probs);
  return table;
}

void write_quantile_csv(const QuantileTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << "prob,q_a,q_b\n";
  for (std::size_t k = 0; k < table.probs.size(); ++k)
    out << format_double(table.probs[k]) << ','
        << format_double(table.quantiles_a[k]) << ','
        << format_double(table.quantiles_b[k]) << '\n';
  if (!out) raise(ErrorCode::Io, "write failed for '" + path + "'");
}

KsResult ks_two_sample(std::span<const double> sample_a,
                       std::span<const double> sample_b, double tau_a,
                       double tau_b) {
  if (sample_a.empty() || sample_b.empty())
    raise(ErrorCode::InvalidArgument, "ks_two_sample needs nonempty samples");

  std::vector<double> a(sample_a.begin(), sample_a.end());
  std::vector<double> b(sample_b.begin(), sample_b.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double stat = 0.0;
  std::size_t i = 0, j = 0;
  // Walk the pooled jump points; ties advance both sides before evaluating.
  // Once one side is exhausted the gap only shrinks, so the loop covers the sup.
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    stat = std::max(stat,
                    std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }

  KsResult out;
  out.statistic = stat;
  out.n_eff_a = na / std::max(tau_a, 1.0);
  out.n_eff_b = nb / std::max(tau_b, 1.0);
  out.deflated = tau_a > 1.0 || tau_b > 1.0;
  // Asymptotic two-sided critical value at the 1% level.
  const double c01 = std::sqrt(-0.5 * std::log(0.005));
  const double crit =
      c01 * std::sqrt((out.n_eff_a + out.n_eff_b) / (out.n_eff_a * out.n_eff_b));
  out.reject_at_1pct = out.statistic > crit;
  return out;
}

RunReport make_run_report(const Chain& chain) {
  RunReport report;
  report.iat = iat_report(chain.states);
  report.acceptance_rate = chain.acceptance_rate();
  report.tuned_h = chain.tuned_h;
  report.divergences = chain.divergences;
  const Eigen::Index dim = chain.states.cols();
  const double n = static_cast<double>(chain.states.rows());
  report.moments.resize(static_cast<std::size_t>(dim));
  for (Eigen::Index c = 0; c < dim; ++c) {
    const double mean = chain.states.col(c).mean();
    const double var =
        (chain.states.col(c).array() - mean).square().sum() / (n - 1.0);
    report.moments[static_cast<std::size_t>(c)] = {mean, var};
  }
  return report;
}

std::string run_report_json(const RunReport& report,
                            const std::vector<std::string>& component_names) {
  nlohmann::json j;
  j["acceptance_rate"] = report.acceptance_rate;
  j["tuned_h"] = report.tuned_h;
  j["divergences"] = report.divergences;
  j["tau_max"] = report.iat.tau_max;
  auto comps = nlohmann::json::array();
  for (std::size_t c = 0; c < report.moments.size(); ++c) {
    nlohmann::json comp;
    comp["name"] = c < component_names.size() ? component_names[c]
                                              : "x_" + std::to_string(c + 1);
    comp["tau"] = report.iat.tau_per_component[c];
    comp["truncation_lag"] = report.iat.truncation_lag_per_component[c];
    comp["mean"] = report.moments[c].mean;
    comp["variance"] = report.moments[c].variance;
    if (report.ks_per_component && c < report.ks_per_component->size())
      comp["ks_statistic"] = (*report.ks_per_component)[c];
    if (report.ks_reject_per_component &&
        c < report.ks_reject_per_component->size())
      comp["ks_reject_at_1pct"] = (*report.ks_reject_per_component)[c];
    comps.push_back(std::move(comp));
  }
  j["components"] = std::move(comps);
  return j.dump(2);
}

}  // namespace rosenbench
