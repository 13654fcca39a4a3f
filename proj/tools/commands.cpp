#include "commands.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <sstream>
#include <thread>

#include "numeric_check.hpp"

namespace cli {

namespace fs = std::filesystem;

namespace {

using nlohmann::json;

double jnum(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_string()) return std::stod(v.get<std::string>());
  return v.get<double>();
}

template <typename T>
T jget(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ','))
    if (!cell.empty()) out.push_back(std::stod(cell));
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ','))
    if (!cell.empty()) out.push_back(std::stoi(cell));
  return out;
}

void configure(ConfigPtr& cfg, const std::string& algorithm, long steps,
               long warmup, long thin, double h0, double alpha,
               double target_accept, const std::vector<double>& init,
               const std::string& regularization = "floor") {
  check(rb_config_set_algorithm(cfg.get, algorithm_from_string(algorithm)),
        "algorithm");
  check(rb_config_set_steps(cfg.get, steps), "steps");
  check(rb_config_set_warmup(cfg.get, warmup), "warmup");
  check(rb_config_set_thin(cfg.get, thin), "thin");
  check(rb_config_set_step_size(cfg.get, h0), "step size");
  check(rb_config_set_alpha(cfg.get, alpha), "alpha");
  check(rb_config_set_target_accept(cfg.get, target_accept), "target accept");
  if (regularization == "scale")
    check(rb_config_set_regularization(cfg.get, RB_REG_ABS_EIGEN_SCALE),
          "regularization");
  else if (regularization != "floor")
    throw CliError("unknown regularization '" + regularization + "'");
  if (!init.empty())
    check(rb_config_set_init(cfg.get, init.data(),
                             static_cast<int>(init.size())),
          "init");
}

// One row per component: the CSV face of the run report.
void write_component_csv(const fs::path& path, const rb_chain* chain,
                         const rb_model* model, const double* tau,
                         const double* ks_stats, const int* ks_reject) {
  const int dim = rb_chain_cols(chain);
  const long rows = rb_chain_rows(chain);
  const double* data = rb_chain_data(chain);
  std::string csv = "component,tau,mean,variance";
  if (ks_stats) csv += ",ks_statistic,ks_reject_at_1pct";
  csv += '\n';
  for (int c = 0; c < dim; ++c) {
    double mean = 0.0;
    for (long t = 0; t < rows; ++t) mean += data[t * dim + c];
    mean /= static_cast<double>(rows);
    double var = 0.0;
    for (long t = 0; t < rows; ++t) {
      const double d = data[t * dim + c] - mean;
      var += d * d;
    }
    var /= static_cast<double>(rows - 1);
    csv += std::string(rb_model_component_name(model, c)) + ',' +
           format_double(tau[c]) + ',' + format_double(mean) + ',' +
           format_double(var);
    if (ks_stats)
      csv += ',' + format_double(ks_stats[c]) + ',' +
             std::to_string(ks_reject[c]);
    csv += '\n';
  }
  write_text_file(path, csv);
}

}  // namespace

rb_algorithm algorithm_from_string(const std::string& name) {
  if (name == "rwm") return RB_ALG_RWM;
  if (name == "mala") return RB_ALG_MALA;
  if (name == "smmala") return RB_ALG_SMMALA;
  throw CliError("unknown algorithm '" + name + "'");
}

void write_manifest(const Context& ctx, const std::string& command,
                    const json& params) {
  json m;
  m["manifest_version"] = 1;
  m["tool"] = "rosenbench";
  m["tool_version"] = rb_version();
  m["command"] = command;
  m["seed"] = ctx.seed;
  m["threads"] = ctx.threads;
  m["params"] = params;
  write_text_file(ctx.out_path("manifest.json"), m.dump(2) + "\n");
}

/* ---- sample ----------------------------------------------------------- */

void SampleCmd::attach(CLI::App* cmd) {
  model.attach(cmd);
  cmd->add_option("--n", n, "number of draws")->check(CLI::PositiveNumber);
  cmd->add_option("--stream", stream, "rng stream id");
}

void SampleCmd::from_params(const json& params) {
  if (params.contains("model")) model.model_json = params.at("model").dump();
  n = jget<long>(params, "n", n);
  stream = jget<std::uint64_t>(params, "stream", stream);
}

int SampleCmd::run(const Context& ctx) {
  const json model_json = model.resolve();
  ModelPtr m = model_from_json_text(model_json.dump());

  rb_batch* raw = nullptr;
  check(rb_sample_exact(m.get, n, ctx.seed, stream, &raw), "sample");
  BatchPtr batch(raw);

  check(rb_batch_write_csv(batch.get, ctx.out_path("sample.csv").c_str()),
        "sample.csv");
  check(rb_batch_write_binary(batch.get, ctx.out_path("sample.bin").c_str()),
        "sample.bin");

  json meta;
  meta["model"] = model_json;
  meta["n"] = n;
  meta["dim"] = rb_batch_cols(batch.get);
  meta["seed"] = ctx.seed;
  meta["stream_id"] = stream;
  meta["gaussian_method"] = rb_batch_gaussian_method(batch.get);
  write_text_file(ctx.out_path("sample_meta.json"), meta.dump(2) + "\n");

  json params;
  params["model"] = model_json;
  params["n"] = n;
  params["stream"] = stream;
  write_manifest(ctx, "sample", params);

  std::cout << "wrote " << n << " draws of dimension "
            << rb_batch_cols(batch.get) << " to " << ctx.out_dir << "\n";
  return 0;
}

/* ---- mcmc ------------------------------------------------------------- */

void McmcCmd::attach(CLI::App* cmd) {
  model.attach(cmd);
  cmd->add_option("--algorithm", algorithm, "rwm|mala|smmala")
      ->check(CLI::IsMember({"rwm", "mala", "smmala"}));
  cmd->add_option("--steps", steps, "post-warmup steps")->check(CLI::PositiveNumber);
  cmd->add_option("--warmup", warmup, "warmup steps (step size adapts here)");
  cmd->add_option("--thin", thin, "keep every thin-th state");
  cmd->add_option("--h0", h0, "initial step size");
  cmd->add_option("--alpha", alpha, "metric regularization strength");
  cmd->add_option("--target-accept", target_accept, "warmup acceptance target");
  cmd->add_option("--regularization", regularization,
                  "eigenvalue handling below 1/alpha: floor|scale")
      ->check(CLI::IsMember({"floor", "scale"}));
  cmd->add_option("--stream", stream, "rng stream id");
  cmd->add_option("--init", init, "start state (default all ones)")
      ->delimiter(',');
}

void McmcCmd::from_params(const json& params) {
  if (params.contains("model")) model.model_json = params.at("model").dump();
  algorithm = jget<std::string>(params, "algorithm", algorithm);
  steps = jget<long>(params, "steps", steps);
  warmup = jget<long>(params, "warmup", warmup);
  thin = jget<long>(params, "thin", thin);
  h0 = jnum(params, "h0", h0);
  alpha = jnum(params, "alpha", alpha);
  target_accept = jnum(params, "target_accept", target_accept);
  regularization = jget<std::string>(params, "regularization", regularization);
  stream = jget<std::uint64_t>(params, "stream", stream);
  init = jget<std::vector<double>>(params, "init", init);
}

int McmcCmd::run(const Context& ctx) {
  const json model_json = model.resolve();
  ModelPtr m = model_from_json_text(model_json.dump());

  ConfigPtr cfg;
  configure(cfg, algorithm, steps, warmup, thin, h0, alpha, target_accept, init,
            regularization);

  rb_chain* raw = nullptr;
  check(rb_run_chain(m.get, cfg.get, ctx.seed, stream, &raw), "chain");
  ChainPtr chain(raw);

  check(rb_chain_write_csv(chain.get, m.get, ctx.out_path("chain.csv").c_str()),
        "chain.csv");
  check(rb_chain_write_binary(chain.get, ctx.out_path("chain.bin").c_str()),
        "chain.bin");
  char* meta = nullptr;
  check(rb_chain_meta_json(chain.get, &meta), "chain meta");
  write_text_file(ctx.out_path("chain_meta.json"), std::string(meta) + "\n");
  rb_string_free(meta);

  if (rb_chain_rows(chain.get) >= 100) {
    char* report = nullptr;
    check(rb_chain_report_json(chain.get, m.get, nullptr, nullptr, 0, &report),
          "report");
    write_text_file(ctx.out_path("report.json"), std::string(report) + "\n");
    rb_string_free(report);

    std::vector<double> tau(static_cast<std::size_t>(rb_chain_cols(chain.get)));
    double tau_max = 0.0;
    check(rb_chain_iat(chain.get, tau.data(), nullptr, &tau_max), "iat");
    write_component_csv(ctx.out_path("report_components.csv"), chain.get, m.get,
                        tau.data(), nullptr, nullptr);
  } else {
    std::cout << "chain too short for autocorrelation diagnostics; report "
                 "files skipped\n";
  }

  json params;
  params["model"] = model_json;
  params["algorithm"] = algorithm;
  params["steps"] = steps;
  params["warmup"] = warmup;
  params["thin"] = thin;
  params["h0"] = h0;
  params["alpha"] = alpha;
  params["target_accept"] = target_accept;
  params["regularization"] = regularization;
  params["stream"] = stream;
  if (!init.empty()) params["init"] = init;
  write_manifest(ctx, "mcmc", params);

  std::cout << "chain: " << rb_chain_rows(chain.get) << " kept states, acceptance "
            << rb_chain_acceptance_rate(chain.get) << ", tuned h "
            << rb_chain_tuned_step(chain.get) << ", divergences "
            << rb_chain_divergences(chain.get) << "\n";
  return 0;
}

/* ---- constant-check --------------------------------------------------- */

void ConstantCheckCmd::attach(CLI::App* cmd) {
  model.attach(cmd);
  cmd->add_option("--is-samples", is_samples,
                  "importance samples for the hybrid check")
      ->check(CLI::PositiveNumber);
}

void ConstantCheckCmd::from_params(const json& params) {
  if (params.contains("model")) model.model_json = params.at("model").dump();
  is_samples = jget<long>(params, "is_samples", is_samples);
}

int ConstantCheckCmd::run(const Context& ctx) {
  const json model_json = model.resolve();
  ModelPtr m = model_from_json_text(model_json.dump());
  const std::string family = rb_model_family(m.get);

  double closed = 0.0;
  const rb_status status = rb_log_norm_constant(m.get, &closed);
  if (status == RB_ERR_NOT_AVAILABLE) {
    std::cout << "normalising constant unknown for family '" << family << "'\n";
    return 1;
  }
  check(status, "constant");

  double estimate = 0.0;
  std::string method;
  if (family == "twod") {
    method = "adaptive-quadrature";
    const double integral = twod_kernel_integral(
        m.get, jnum(model_json, "mu", 1.0), jnum(model_json, "a", 0.05),
        jnum(model_json, "b", 5.0));
    estimate = -std::log(integral);
  } else {
    method = "importance-sampling";
    estimate = -hybrid_log_integral_is(m.get, is_samples, ctx.seed);
  }
  const double rel_err = std::abs(std::expm1(estimate - closed));

  json out;
  out["family"] = family;
  out["model"] = model_json;
  out["log_constant_closed_form"] = closed;
  out["log_constant_estimate"] = estimate;
  out["relative_error"] = rel_err;
  out["method"] = method;
  if (family != "twod") out["is_samples"] = is_samples;
  write_text_file(ctx.out_path("constant_check.json"), out.dump(2) + "\n");

  json params;
  params["model"] = model_json;
  params["is_samples"] = is_samples;
  write_manifest(ctx, "constant-check", params);

  std::cout << "family " << family << ": closed-form log constant " << closed
            << ", " << method << " estimate " << estimate
            << ", relative error " << rel_err << "\n";
  return 0;
}

/* ---- validate ---------------------------------------------------------- */

void ValidateCmd::attach(CLI::App* cmd) {
  model.attach(cmd);
  cmd->add_option("--mcmc-model-json", mcmc_model_json,
                  "override the MCMC target (negative controls)");
  cmd->add_option("--mcmc-model-file", mcmc_model_file,
                  "override the MCMC target from a JSON file");
  cmd->add_option("--n-exact", n_exact, "exact draws")->check(CLI::PositiveNumber);
  cmd->add_option("--steps", steps, "MCMC steps before thinning")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--warmup", warmup, "warmup steps");
  cmd->add_option("--thin", thin, "thinning factor");
  cmd->add_option("--h0", h0, "initial step size");
  cmd->add_option("--alpha", alpha, "metric regularization strength");
  cmd->add_option("--target-accept", target_accept, "warmup acceptance target");
  cmd->add_option("--algorithm", algorithm, "rwm|mala|smmala")
      ->check(CLI::IsMember({"rwm", "mala", "smmala"}));
}

void ValidateCmd::from_params(const json& params) {
  if (params.contains("model")) model.model_json = params.at("model").dump();
  if (params.contains("mcmc_model"))
    mcmc_model_json = params.at("mcmc_model").dump();
  n_exact = jget<long>(params, "n_exact", n_exact);
  steps = jget<long>(params, "steps", steps);
  warmup = jget<long>(params, "warmup", warmup);
  thin = jget<long>(params, "thin", thin);
  h0 = jnum(params, "h0", h0);
  alpha = jnum(params, "alpha", alpha);
  target_accept = jnum(params, "target_accept", target_accept);
  algorithm = jget<std::string>(params, "algorithm", algorithm);
}

int ValidateCmd::run(const Context& ctx) {
  const json model_json = model.resolve();
  ModelPtr m = model_from_json_text(model_json.dump());

  json mcmc_json = model_json;
  if (!mcmc_model_file.empty()) mcmc_json = read_json_file(mcmc_model_file);
  else if (!mcmc_model_json.empty()) mcmc_json = json::parse(mcmc_model_json);
  ModelPtr target = model_from_json_text(mcmc_json.dump());

  const int dim = rb_model_dim(m.get);
  if (rb_model_dim(target.get) != dim)
    throw CliError("exact and MCMC models must share a dimension");

  rb_batch* raw_batch = nullptr;
  check(rb_sample_exact(m.get, n_exact, ctx.seed, 0, &raw_batch), "exact draws");
  BatchPtr batch(raw_batch);

  ConfigPtr cfg;
  configure(cfg, algorithm, steps, warmup, thin, h0, alpha, target_accept, {});
  rb_chain* raw_chain = nullptr;
  check(rb_run_chain(target.get, cfg.get, ctx.seed, 1, &raw_chain), "chain");
  ChainPtr chain(raw_chain);

  std::vector<double> tau(static_cast<std::size_t>(dim));
  double tau_max = 0.0;
  check(rb_chain_iat(chain.get, tau.data(), nullptr, &tau_max), "iat");

  std::vector<double> probs;
  for (int k = 1; k <= 199; ++k) probs.push_back(0.005 * k);

  std::vector<double> ks_stats(static_cast<std::size_t>(dim));
  std::vector<int> ks_reject(static_cast<std::size_t>(dim));
  json components = json::array();
  bool all_pass = true;

  for (int c = 0; c < dim; ++c) {
    const std::vector<double> exact = batch_column(batch.get, c);
    const std::vector<double> kept = chain_column(chain.get, c);

    double stat = 0.0;
    int reject = 0;
    check(rb_ks_two_sample(exact.data(), static_cast<long>(exact.size()),
                           kept.data(), static_cast<long>(kept.size()), 1.0,
                           tau[static_cast<std::size_t>(c)], &stat, &reject),
          "ks");
    ks_stats[static_cast<std::size_t>(c)] = stat;
    ks_reject[static_cast<std::size_t>(c)] = reject;
    all_pass = all_pass && !reject;

    std::vector<double> q_exact(probs.size()), q_mcmc(probs.size());
    check(rb_quantiles(exact.data(), static_cast<long>(exact.size()),
                       probs.data(), static_cast<int>(probs.size()),
                       q_exact.data()),
          "quantiles");
    check(rb_quantiles(kept.data(), static_cast<long>(kept.size()), probs.data(),
                       static_cast<int>(probs.size()), q_mcmc.data()),
          "quantiles");

    const std::string name = rb_model_component_name(m.get, c);
    std::string csv = "prob,q_exact,q_mcmc\n";
    for (std::size_t k = 0; k < probs.size(); ++k)
      csv += format_double(probs[k]) + ',' + format_double(q_exact[k]) + ',' +
             format_double(q_mcmc[k]) + '\n';
    write_text_file(ctx.out_path("qq_" + name + ".csv"), csv);

    json comp;
    comp["name"] = name;
    comp["tau"] = tau[static_cast<std::size_t>(c)];
    comp["ks_statistic"] = stat;
    comp["ks_reject_at_1pct"] = reject != 0;
    components.push_back(comp);

    std::cout << name << ": tau " << tau[static_cast<std::size_t>(c)] << ", ks "
              << stat << (reject ? " REJECT" : " pass") << "\n";
  }

  char* run_report = nullptr;
  check(rb_chain_report_json(chain.get, target.get, ks_stats.data(),
                             ks_reject.data(), dim, &run_report),
        "report");
  write_component_csv(ctx.out_path("report_components.csv"), chain.get,
                      target.get, tau.data(), ks_stats.data(),
                      ks_reject.data());
  json report = json::parse(run_report);
  rb_string_free(run_report);
  report["validation"] = {{"n_exact", n_exact},
                          {"all_components_pass_at_1pct", all_pass},
                          {"components", components}};
  write_text_file(ctx.out_path("report.json"), report.dump(2) + "\n");

  json params;
  params["model"] = model_json;
  if (mcmc_json != model_json) params["mcmc_model"] = mcmc_json;
  params["n_exact"] = n_exact;
  params["steps"] = steps;
  params["warmup"] = warmup;
  params["thin"] = thin;
  params["h0"] = h0;
  params["alpha"] = alpha;
  params["target_accept"] = target_accept;
  params["algorithm"] = algorithm;
  write_manifest(ctx, "validate", params);

  std::cout << (all_pass ? "validation PASS" : "validation FAIL") << " (acceptance "
            << rb_chain_acceptance_rate(chain.get) << ", tuned h "
            << rb_chain_tuned_step(chain.get) << ")\n";
  return all_pass ? 0 : 2;
}

/* ---- sensitivity ------------------------------------------------------- */

void SensitivityCmd::attach(CLI::App* cmd) {
  cmd->add_option("--models", models, "comma list of catalog ids (1-6)");
  cmd->add_option("--reps", reps, "repetitions per grid cell")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--steps", steps, "MCMC steps per run")->check(CLI::PositiveNumber);
  cmd->add_option("--warmup", warmup, "warmup steps");
  cmd->add_option("--alpha", alpha, "metric regularization strength");
  cmd->add_option("--h0", h0, "initial step size");
  cmd->add_option("--target-accept", target_accept, "warmup acceptance target");
  cmd->add_option("--sweep", sweep, "comma list of standard|mu|a|b, or 'all'");
  cmd->add_option("--mu-values", mu_values, "mu sweep values");
  cmd->add_option("--a-values", a_values, "a sweep values");
  cmd->add_option("--b-values", b_values, "b sweep values");
}

void SensitivityCmd::from_params(const json& params) {
  models = jget<std::string>(params, "models", models);
  reps = jget<int>(params, "reps", reps);
  steps = jget<long>(params, "steps", steps);
  warmup = jget<long>(params, "warmup", warmup);
  alpha = jnum(params, "alpha", alpha);
  h0 = jnum(params, "h0", h0);
  target_accept = jnum(params, "target_accept", target_accept);
  sweep = jget<std::string>(params, "sweep", sweep);
  mu_values = jget<std::string>(params, "mu_values", mu_values);
  a_values = jget<std::string>(params, "a_values", a_values);
  b_values = jget<std::string>(params, "b_values", b_values);
}

namespace {

struct GridCell {
  int model_id;
  std::string param;  // standard|mu|a|b
  double value;
  double mu, a, b;
};

struct CellResult {
  bool ok = false;
  double tau_max = std::nan("");
  double acceptance = std::nan("");
  double tuned_h = std::nan("");
  long divergences = -1;
};

constexpr double kStdMu = 1.0, kStdA = 0.05, kStdB = 5.0;

std::vector<GridCell> build_grid(const std::string& models_text,
                                 const std::string& sweep_text,
                                 const std::string& mu_text,
                                 const std::string& a_text,
                                 const std::string& b_text) {
  const std::vector<int> ids = parse_int_list(models_text);
  std::vector<std::string> groups;
  if (sweep_text == "all") {
    groups = {"standard", "mu", "a", "b"};
  } else {
    std::stringstream ss(sweep_text);
    std::string cell;
    while (std::getline(ss, cell, ','))
      if (!cell.empty()) groups.push_back(cell);
  }
  std::vector<GridCell> grid;
  for (int id : ids) {
    catalog_entry(id);  // validates
    for (const std::string& g : groups) {
      if (g == "standard") {
        grid.push_back({id, "standard", 0.0, kStdMu, kStdA, kStdB});
      } else if (g == "mu") {
        for (double v : parse_double_list(mu_text))
          if (v != kStdMu) grid.push_back({id, "mu", v, v, kStdA, kStdB});
      } else if (g == "a") {
        for (double v : parse_double_list(a_text))
          if (v != kStdA) grid.push_back({id, "a", v, kStdMu, v, kStdB});
      } else if (g == "b") {
        for (double v : parse_double_list(b_text))
          if (v != kStdB) grid.push_back({id, "b", v, kStdMu, kStdA, v});
      } else {
        throw CliError("unknown sweep group '" + g + "'");
      }
    }
  }
  return grid;
}

}  // namespace

int SensitivityCmd::run(const Context& ctx) {
  const std::vector<GridCell> grid =
      build_grid(models, sweep, mu_values, a_values, b_values);
  const long n_tasks = static_cast<long>(grid.size()) * reps;
  std::vector<CellResult> results(static_cast<std::size_t>(std::max(n_tasks, 0L)));

  // Cells and repetitions own disjoint streams derived from their indices, so
  // the result set does not depend on the execution schedule.
  auto run_task = [&](long task) {
    const long cell_idx = task / reps;
    const int rep = static_cast<int>(task % reps);
    const GridCell& cell = grid[static_cast<std::size_t>(cell_idx)];
    CellResult& res = results[static_cast<std::size_t>(task)];
    try {
      const json mj = catalog_model(cell.model_id, cell.mu, cell.a, cell.b);
      ModelPtr m = model_from_json_text(mj.dump());
      ConfigPtr cfg;
      configure(cfg, "smmala", steps, warmup, 1, h0, alpha, target_accept, {});
      const std::uint64_t stream =
          static_cast<std::uint64_t>(cell_idx) * 1000003ULL +
          static_cast<std::uint64_t>(rep);
      rb_chain* raw = nullptr;
      check(rb_run_chain(m.get, cfg.get, ctx.seed, stream, &raw), "chain");
      ChainPtr chain(raw);

      std::vector<double> tau(static_cast<std::size_t>(rb_chain_cols(chain.get)));
      double tau_max = 0.0;
      check(rb_chain_iat(chain.get, tau.data(), nullptr, &tau_max), "iat");
      res.tau_max = tau_max;
      res.acceptance = rb_chain_acceptance_rate(chain.get);
      res.tuned_h = rb_chain_tuned_step(chain.get);
      res.divergences = rb_chain_divergences(chain.get);
      res.ok = true;
    } catch (const std::exception&) {
      res.ok = false;  // overflow cells are recorded, not fatal
    }
  };

  const int workers = std::max(1, std::min<int>(ctx.threads, 64));
  if (workers == 1 || n_tasks <= 1) {
    for (long t = 0; t < n_tasks; ++t) run_task(t);
  } else {
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (long t = next.fetch_add(1); t < n_tasks; t = next.fetch_add(1))
          run_task(t);
      });
    for (auto& th : pool) th.join();
  }

  std::string csv =
      "model,n1,n2,param,value,mu,a,b,rep,tau_max,acceptance_rate,tuned_h,"
      "divergences,status\n";
  for (long task = 0; task < n_tasks; ++task) {
    const GridCell& cell = grid[static_cast<std::size_t>(task / reps)];
    const CellResult& res = results[static_cast<std::size_t>(task)];
    const CatalogEntry& entry = catalog_entry(cell.model_id);
    csv += std::to_string(cell.model_id) + ',' + std::to_string(entry.n1) + ',' +
           std::to_string(entry.n2) + ',' + cell.param + ',' +
           (cell.param == "standard" ? "" : format_double(cell.value)) + ',' +
           format_double(cell.mu) + ',' + format_double(cell.a) + ',' +
           format_double(cell.b) + ',' + std::to_string(task % reps) + ',' +
           format_double(res.tau_max) + ',' + format_double(res.acceptance) +
           ',' + format_double(res.tuned_h) + ',' +
           std::to_string(res.divergences) + ',' + (res.ok ? "ok" : "failed") +
           '\n';
  }
  write_text_file(ctx.out_path("sensitivity.csv"), csv);

  json params;
  params["models"] = models;
  params["reps"] = reps;
  params["steps"] = steps;
  params["warmup"] = warmup;
  params["alpha"] = alpha;
  params["h0"] = h0;
  params["target_accept"] = target_accept;
  params["sweep"] = sweep;
  params["mu_values"] = mu_values;
  params["a_values"] = a_values;
  params["b_values"] = b_values;
  write_manifest(ctx, "sensitivity", params);

  std::cout << "sensitivity grid: " << grid.size() << " cells x " << reps
            << " repetitions -> " << ctx.out_path("sensitivity.csv").string()
            << "\n";
  return 0;
}

}  // namespace cli
