#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "desparse/core.hpp"

namespace desparse::io {

/// Binary matrix container: magic "DSPM1", u64 rows, u64 cols (little-endian),
/// then rows * cols little-endian f64 in row-major order.
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);
std::string encode_matrix(const Matrix& m);
Matrix decode_matrix(std::string_view bytes);

/// Shortest round-trip decimal representation ("nan", "inf", "-inf" for non-finite).
std::string format_double(double x);

/// Writes to a temporary sibling then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// CSV with LF line endings and '.' decimals.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& cells);
  const std::string& str() const noexcept { return buffer_; }

 private:
  std::size_t columns_;
  std::string buffer_;
};

}  // namespace desparse::io
