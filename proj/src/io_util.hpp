#pragma once

#include <charconv>
#include <cstdint>
#include <string>

#include "errors.hpp"
#include "model.hpp"

namespace rosenbench {

// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Raw matrix container format shared by sample batches and chains: a 32-byte
// header (8-byte magic, u32 version, u32 dim, u64 row count, 8 reserved bytes)
// followed by row-major little-endian float64 data.
inline constexpr char kMatrixMagic[8] = {'R', 'B', 'M', 'A', 'T', 'R', 'X', '\0'};
inline constexpr std::uint32_t kMatrixFormatVersion = 1;

void write_matrix_binary(const RowMatrixXd& m, const std::string& path);
RowMatrixXd read_matrix_binary(const std::string& path);

void write_matrix_csv(const RowMatrixXd& m,
                      const std::vector<std::string>& column_names,
                      const std::string& path);

}  // namespace rosenbench
