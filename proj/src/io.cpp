#include "alsq/io.hpp"

#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace alsq {

namespace {

constexpr char kMagic[4] = {'A', 'L', 'S', 'M'};
constexpr unsigned char kVersion = 0x01;

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::istream& is, const std::string& path) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8)) throw Error(path + ": truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& os, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  put_u64(os, bits);
}

double get_f64(std::istream& is, const std::string& path) {
  std::uint64_t bits = get_u64(is, path);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

Matrix read_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(path + ": cannot open");
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw Error(path + ": bad magic, not an ALSM matrix file");
  char ver;
  if (!is.get(ver) || static_cast<unsigned char>(ver) != kVersion)
    throw Error(path + ": unsupported format version");
  std::uint64_t n = get_u64(is, path);
  std::uint64_t d = get_u64(is, path);
  if (n == 0 || d == 0) throw Error(path + ": empty dimensions");
  Matrix a(static_cast<Index>(n), static_cast<Index>(d));
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < d; ++j) {
      double x = get_f64(is, path);
      if (!std::isfinite(x))
        throw Error(path + ": non-finite value at row " + std::to_string(i) + ", col " +
                    std::to_string(j));
      a(static_cast<Index>(i), static_cast<Index>(j)) = x;
    }
  return a;
}

void write_binary(const std::string& path, const Matrix& a) {
  check_finite(a, path);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(path + ": cannot open for writing");
  os.write(kMagic, 4);
  os.put(static_cast<char>(kVersion));
  put_u64(os, static_cast<std::uint64_t>(a.rows()));
  put_u64(os, static_cast<std::uint64_t>(a.cols()));
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) put_f64(os, a(i, j));
  if (!os) throw Error(path + ": write failed");
}

Matrix read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(path + ": cannot open");
  std::vector<std::vector<double>> rows;
  std::string line;
  Index lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    Index col = 0;
    while (std::getline(ss, cell, ',')) {
      ++col;
      try {
        size_t pos = 0;
        double x = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument("trailing junk");
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite");
        row.push_back(x);
      } catch (const std::exception&) {
        throw Error(path + ": bad value '" + cell + "' at row " + std::to_string(lineno) +
                    ", col " + std::to_string(col));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(path + ": row " + std::to_string(lineno) + " has " +
                  std::to_string(row.size()) + " columns, expected " +
                  std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(path + ": empty file");
  Matrix a(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) a(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  return a;
}

void write_csv(const std::string& path, const Matrix& a) {
  check_finite(a, path);
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(path + ": cannot open for writing");
  os.precision(std::numeric_limits<double>::max_digits10);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (j) os << ',';
      os << a(i, j);
    }
    os << '\n';
  }
  if (!os) throw Error(path + ": write failed");
}

}  // namespace

Matrix read_matrix(const std::string& path, MatrixFormat format) {
  return format == MatrixFormat::Binary ? read_binary(path) : read_csv(path);
}

void write_matrix(const std::string& path, const Matrix& a, MatrixFormat format) {
  if (format == MatrixFormat::Binary)
    write_binary(path, a);
  else
    write_csv(path, a);
}

Vector read_vector(const std::string& path, MatrixFormat format) {
  Matrix a = read_matrix(path, format);
  if (a.cols() == 1) return a.col(0);
  if (a.rows() == 1) return a.row(0).transpose();
  throw Error(path + ": expected a vector, got " + std::to_string(a.rows()) + "x" +
              std::to_string(a.cols()));
}

void write_vector(const std::string& path, const Vector& v, MatrixFormat format) {
  Matrix a(v.size(), 1);
  a.col(0) = v;
  write_matrix(path, a, format);
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(path + ": cannot open for writing");
  os << contents;
  if (!os) throw Error(path + ": write failed");
}

}  // namespace alsq
