#include "desparse/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "desparse/errors.hpp"

namespace desparse::io {

namespace {

constexpr std::string_view kMagic = "DSPM1";

static_assert(std::endian::native == std::endian::little, "matrix container assumes a little-endian host");

void put_u64(std::string& out, std::uint64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

std::uint64_t get_u64(std::string_view bytes, std::size_t offset) {
  std::uint64_t v;
  std::memcpy(&v, bytes.data() + offset, 8);
  return v;
}

}  // namespace

std::string encode_matrix(const Matrix& m) {
  std::string out(kMagic);
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  out.reserve(out.size() + 8 * static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      const double x = m(i, j);
      char buf[8];
      std::memcpy(buf, &x, 8);
      out.append(buf, 8);
    }
  }
  return out;
}

Matrix decode_matrix(std::string_view bytes) {
  const std::size_t header = kMagic.size() + 16;
  if (bytes.size() < header || bytes.substr(0, kMagic.size()) != kMagic) {
    throw IoError("not a DSPM1 matrix container");
  }
  const std::uint64_t rows = get_u64(bytes, kMagic.size());
  const std::uint64_t cols = get_u64(bytes, kMagic.size() + 8);
  if (cols != 0 && rows > (bytes.size() - header) / 8 / cols) throw IoError("truncated matrix container");
  if (bytes.size() != header + 8 * rows * cols) throw IoError("matrix container size mismatch");
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  std::size_t offset = header;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      double x;
      std::memcpy(&x, bytes.data() + offset, 8);
      m(i, j) = x;
      offset += 8;
    }
  }
  return m;
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) { write_file_atomic(path, encode_matrix(m)); }

Matrix read_matrix(const std::filesystem::path& path) { return decode_matrix(read_file(path)); }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, result.ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { add_row(header); }

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw InvalidArgument("CSV row has the wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) buffer_ += ',';
    buffer_ += cells[i];
  }
  buffer_ += '\n';
}

}  // namespace desparse::io
