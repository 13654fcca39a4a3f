#pragma once

// Model selection flags shared by the subcommands, resolved to a model JSON
// document. Resolution order: --model-file, then --model-json, then
// --model-id (catalog structure), then --family with its parameters.

#include <CLI11.hpp>
#include <json.hpp>

#include "catalog.hpp"
#include "cli_util.hpp"

namespace cli {

struct ModelOptions {
  std::string model_file;
  std::string model_json;
  int model_id = 0;  // 1..6 picks a catalog structure
  std::string family = "hybrid";
  double mu = 1.0;
  double a = 0.05;
  double b = 5.0;
  int n1 = 3;
  int n2 = 2;
  int n = 4;
  double scale = 0.05;
  double quad_coeff = 100.0;
  std::vector<double> mus;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model-file", model_file, "model spec as a JSON file");
    cmd->add_option("--model-json", model_json, "model spec as inline JSON");
    cmd->add_option("--model-id", model_id,
                    "catalog structure 1-6 (hybrid; combine with --mu/--a/--b)")
        ->check(CLI::Range(1, 6));
    cmd->add_option("--family", family, "twod|full|even|hybrid")
        ->check(CLI::IsMember({"twod", "full", "even", "hybrid"}));
    cmd->add_option("--mu", mu, "location parameter");
    cmd->add_option("--a", a, "root precision coefficient");
    cmd->add_option("--b", b, "link precision coefficient (uniform)");
    cmd->add_option("--n1", n1, "hybrid block length");
    cmd->add_option("--n2", n2, "hybrid block count");
    cmd->add_option("--dim", n, "dimension for full/even");
    cmd->add_option("--scale", scale, "full/even overall scale");
    cmd->add_option("--quad-coeff", quad_coeff, "full/even quadratic coefficient");
    cmd->add_option("--mus", mus, "even per-pair locations")->delimiter(',');
  }

  nlohmann::json resolve() const {
    if (!model_file.empty()) return read_json_file(model_file);
    if (!model_json.empty()) {
      try {
        return nlohmann::json::parse(model_json);
      } catch (const nlohmann::json::exception& e) {
        throw CliError(std::string("invalid --model-json: ") + e.what());
      }
    }
    if (model_id > 0) return catalog_model(model_id, mu, a, b);

    nlohmann::json j;
    j["family"] = family;
    if (family == "twod") {
      j["mu"] = mu;
      j["a"] = a;
      j["b"] = b;
    } else if (family == "full") {
      j["n"] = n;
      j["scale"] = scale;
      j["quad_coeff"] = quad_coeff;
      j["mu"] = mu;
    } else if (family == "even") {
      j["n"] = n;
      j["scale"] = scale;
      j["quad_coeff"] = quad_coeff;
      if (mus.empty())
        j["mus"] = mu;  // scalar broadcast
      else
        j["mus"] = mus;
    } else {
      j["mu"] = mu;
      j["a"] = a;
      j["b"] = b;
      j["n1"] = n1;
      j["n2"] = n2;
    }
    return j;
  }
};

}  // namespace cli
