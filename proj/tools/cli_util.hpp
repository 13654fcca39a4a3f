#pragma once

// Small helpers shared by the CLI subcommands. The CLI talks to the library
// exclusively through the C interface in rosenbench.h.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rosenbench.h"

namespace cli {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void check(rb_status status, const std::string& context) {
  if (status != RB_OK)
    throw CliError(context + ": " + rb_status_name(status) + " (" +
                   rb_last_error() + ")");
}

inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw CliError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw CliError("write failed for '" + path.string() + "'");
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CliError("invalid JSON in '" + path.string() + "': " + e.what());
  }
  return j;
}

// Owning wrappers around the C handles.
struct ModelPtr {
  rb_model* get = nullptr;
  ModelPtr() = default;
  explicit ModelPtr(rb_model* m) : get(m) {}
  ModelPtr(ModelPtr&& o) noexcept : get(o.get) { o.get = nullptr; }
  ModelPtr& operator=(ModelPtr&& o) noexcept {
    if (this != &o) {
      rb_model_free(get);
      get = o.get;
      o.get = nullptr;
    }
    return *this;
  }
  ModelPtr(const ModelPtr&) = delete;
  ModelPtr& operator=(const ModelPtr&) = delete;
  ~ModelPtr() { rb_model_free(get); }
};

struct BatchPtr {
  rb_batch* get = nullptr;
  explicit BatchPtr(rb_batch* b = nullptr) : get(b) {}
  BatchPtr(const BatchPtr&) = delete;
  BatchPtr& operator=(const BatchPtr&) = delete;
  ~BatchPtr() { rb_batch_free(get); }
};

struct ChainPtr {
  rb_chain* get = nullptr;
  explicit ChainPtr(rb_chain* c = nullptr) : get(c) {}
  ChainPtr(ChainPtr&& o) noexcept : get(o.get) { o.get = nullptr; }
  ChainPtr& operator=(ChainPtr&& o) noexcept {
    if (this != &o) {
      rb_chain_free(get);
      get = o.get;
      o.get = nullptr;
    }
    return *this;
  }
  ChainPtr(const ChainPtr&) = delete;
  ChainPtr& operator=(const ChainPtr&) = delete;
  ~ChainPtr() { rb_chain_free(get); }
};

struct ConfigPtr {
  rb_config* get = nullptr;
  ConfigPtr() { check(rb_config_new(&get), "config"); }
  ConfigPtr(const ConfigPtr&) = delete;
  ConfigPtr& operator=(const ConfigPtr&) = delete;
  ~ConfigPtr() { rb_config_free(get); }
};

inline ModelPtr model_from_json_text(const std::string& text) {
  rb_model* m = nullptr;
  check(rb_model_from_json(text.c_str(), &m), "model");
  return ModelPtr(m);
}

inline std::string model_to_json_text(const rb_model* model) {
  char* text = nullptr;
  check(rb_model_to_json(model, &text), "model json");
  std::string out(text);
  rb_string_free(text);
  return out;
}

inline std::vector<double> chain_column(const rb_chain* chain, int c) {
  const long rows = rb_chain_rows(chain);
  const int cols = rb_chain_cols(chain);
  const double* data = rb_chain_data(chain);
  std::vector<double> col(static_cast<std::size_t>(rows));
  for (long r = 0; r < rows; ++r)
    col[static_cast<std::size_t>(r)] = data[r * cols + c];
  return col;
}

inline std::vector<double> batch_column(const rb_batch* batch, int c) {
  const long rows = rb_batch_rows(batch);
  const int cols = rb_batch_cols(batch);
  const double* data = rb_batch_data(batch);
  std::vector<double> col(static_cast<std::size_t>(rows));
  for (long r = 0; r < rows; ++r)
    col[static_cast<std::size_t>(r)] = data[r * cols + c];
  return col;
}

// Deterministic generator for the CLI-side Monte Carlo verifiers. Kept apart
// from the library's stream type on purpose: the importance-sampling check
// should not share code with what it verifies. splitmix64 state update with
// Box-Muller normals.
class VerifierRng {
public:
  explicit VerifierRng(std::uint64_t seed) : state_(seed ^ 0xabcdef0123456789ULL) {}

  double uniform() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    double u = static_cast<double>(z >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : uniform();
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * M_PI * uniform();
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace cli
