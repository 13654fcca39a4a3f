#include "io_util.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace rosenbench {

static_assert(std::endian::native == std::endian::little,
              "binary container format is little-endian");

void write_matrix_binary(const RowMatrixXd& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot open '" + path + "' for writing");

  char header[32] = {};
  std::memcpy(header, kMatrixMagic, 8);
  const std::uint32_t version = kMatrixFormatVersion;
  const std::uint32_t dim = static_cast<std::uint32_t>(m.cols());
  const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
  std::memcpy(header + 8, &version, 4);
  std::memcpy(header + 12, &dim, 4);
  std::memcpy(header + 16, &rows, 8);
  out.write(header, sizeof(header));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!out) raise(ErrorCode::Io, "write failed for '" + path + "'");
}

RowMatrixXd read_matrix_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open '" + path + "'");
  char header[32];
  in.read(header, sizeof(header));
  if (!in || std::memcmp(header, kMatrixMagic, 8) != 0)
    raise(ErrorCode::Parse, "'" + path + "' is not a matrix container");
  std::uint32_t version, dim;
  std::uint64_t rows;
  std::memcpy(&version, header + 8, 4);
  std::memcpy(&dim, header + 12, 4);
  std::memcpy(&rows, header + 16, 8);
  if (version != kMatrixFormatVersion)
    raise(ErrorCode::Parse, "unsupported container version in '" + path + "'");
  RowMatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!in) raise(ErrorCode::Parse, "'" + path + "' is truncated");
  return m;
}

void write_matrix_csv(const RowMatrixXd& m,
                      const std::vector<std::string>& column_names,
                      const std::string& path) {
  if (column_names.size() != static_cast<std::size_t>(m.cols()))
    raise(ErrorCode::InvalidArgument, "column name count does not match matrix");
  std::ofstream out(path, std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot open '" + path + "' for writing");
  std::string line;
  for (std::size_t c = 0; c < column_names.size(); ++c) {
    if (c) line += ',';
    line += column_names[c];
  }
  line += '\n';
  out << line;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    line.clear();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) line += ',';
      line += format_double(m(r, c));
    }
    line += '\n';
    out << line;
  }
  if (!out) raise(ErrorCode::Io, "write failed for '" + path + "'");
}

}  // namespace rosenbench
