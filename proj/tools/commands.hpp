#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "model_options.hpp"

namespace cli {

// Resolved global settings shared by every subcommand.
struct Context {
  std::uint64_t seed = 20240805;
  std::string out_dir = ".";
  int threads = 1;

  std::filesystem::path out_path(const std::string& name) const {
    return std::filesystem::path(out_dir) / name;
  }
};

struct SampleCmd {
  ModelOptions model;
  long n = 10000;
  std::uint64_t stream = 0;

  void attach(CLI::App* cmd);
  void from_params(const nlohmann::json& params);
  int run(const Context& ctx);
};

struct McmcCmd {
  ModelOptions model;
  std::string algorithm = "smmala";
  long steps = 100000;
  long warmup = 20000;
  long thin = 1;
  double h0 = 0.5;
  double alpha = 1e6;
  double target_accept = 0.5;
  std::string regularization = "floor";  // floor | scale
  std::uint64_t stream = 0;
  std::vector<double> init;

  void attach(CLI::App* cmd);
  void from_params(const nlohmann::json& params);
  int run(const Context& ctx);
};

struct ConstantCheckCmd {
  ModelOptions model;
  long is_samples = 10000000;

  void attach(CLI::App* cmd);
  void from_params(const nlohmann::json& params);
  int run(const Context& ctx);
};

struct ValidateCmd {
  ModelOptions model;
  std::string mcmc_model_json;  // optional target override (negative controls)
  std::string mcmc_model_file;
  long n_exact = 200000;
  long steps = 2000000;
  long warmup = 20000;
  long thin = 10;
  double h0 = 0.5;
  double alpha = 1e6;
  double target_accept = 0.5;
  std::string algorithm = "smmala";

  void attach(CLI::App* cmd);
  void from_params(const nlohmann::json& params);
  int run(const Context& ctx);
};

struct SensitivityCmd {
  std::string models = "1,2,3,4,5,6";
  int reps = 5;
  long steps = 100000;
  long warmup = 20000;
  double alpha = 1e6;
  double h0 = 0.5;
  double target_accept = 0.5;
  std::string sweep = "all";  // comma list of standard|mu|a|b, or "all"
  std::string mu_values = "-4,1";
  std::string a_values = "0.005,0.05,0.5";
  std::string b_values = "0.0005,0.05,5,50";

  void attach(CLI::App* cmd);
  void from_params(const nlohmann::json& params);
  int run(const Context& ctx);
};

void write_manifest(const Context& ctx, const std::string& command,
                    const nlohmann::json& params);

rb_algorithm algorithm_from_string(const std::string& name);

}  // namespace cli
