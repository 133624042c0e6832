#include "gadi/matrix_market.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace gadi::mm {

namespace {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

double parse_double(std::string_view tok) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw ParseError("matrix market: bad number '" + std::string(tok) + "'");
  return v;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

/// Reads the banner and skips comments; returns the first data line.
std::string read_header(std::istream& is, const std::string& expected_format) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("matrix market: empty input");
  std::istringstream banner(lower(line));
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%matrixmarket" || object != "matrix")
    throw ParseError("matrix market: missing %%MatrixMarket matrix banner");
  if (format != expected_format)
    throw ParseError("matrix market: expected " + expected_format + " format, got " + format);
  if (field != "real" && field != "double" && field != "integer")
    throw ParseError("matrix market: unsupported field " + field);
  if (symmetry != "general") throw ParseError("matrix market: only general symmetry is supported");
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '%') continue;
    return line;
  }
  throw ParseError("matrix market: missing size line");
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::size_t parse_index(std::string_view tok) {
  std::size_t v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw ParseError("matrix market: bad index '" + std::string(tok) + "'");
  return v;
}

} // namespace

void write(std::ostream& os, const SparseMatrix& A) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << A.rows() << ' ' << A.cols() << ' ' << A.nnz() << '\n';
  const auto rp = A.row_ptr(), ci = A.col_idx();
  const auto v = A.values();
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
      os << i + 1 << ' ' << ci[k] + 1 << ' ' << format_double(v[k]) << '\n';
}

SparseMatrix read_sparse(std::istream& is) {
  const auto size_line = read_header(is, "coordinate");
  const auto st = tokens(size_line);
  if (st.size() != 3) throw ParseError("matrix market: size line needs rows cols nnz");
  const std::size_t rows = parse_index(st[0]), cols = parse_index(st[1]), nnz = parse_index(st[2]);
  std::vector<Triplet> entries;
  entries.reserve(nnz);
  std::string line;
  while (entries.size() < nnz && std::getline(is, line)) {
    if (line.empty() || line[0] == '%') continue;
    const auto t = tokens(line);
    if (t.size() != 3) throw ParseError("matrix market: entry line needs i j value");
    const std::size_t i = parse_index(t[0]), j = parse_index(t[1]);
    if (i == 0 || j == 0 || i > rows || j > cols)
      throw ParseError("matrix market: entry index out of range");
    entries.push_back({i - 1, j - 1, parse_double(t[2])});
  }
  if (entries.size() != nnz) throw ParseError("matrix market: fewer entries than declared");
  return SparseMatrix::from_triplets(rows, cols, entries);
}

void write(std::ostream& os, const DenseMatrix& X) {
  os << "%%MatrixMarket matrix array real general\n";
  os << X.rows() << ' ' << X.cols() << '\n';
  for (double v : X.data()) os << format_double(v) << '\n';
}

DenseMatrix read_dense(std::istream& is) {
  const auto size_line = read_header(is, "array");
  const auto st = tokens(size_line);
  if (st.size() != 2) throw ParseError("matrix market: array size line needs rows cols");
  DenseMatrix X(parse_index(st[0]), parse_index(st[1]));
  auto data = X.data();
  std::size_t k = 0;
  std::string line;
  while (k < data.size() && std::getline(is, line)) {
    if (line.empty() || line[0] == '%') continue;
    for (auto tok : tokens(line)) {
      if (k == data.size()) throw ParseError("matrix market: too many array values");
      data[k++] = parse_double(tok);
    }
  }
  if (k != data.size()) throw ParseError("matrix market: fewer array values than declared");
  return X;
}

namespace {
template <class T>
void write_to(const std::filesystem::path& path, const T& m) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write(os, m);
  if (!os) throw Error("write failed: " + path.string());
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  return is;
}
} // namespace

void write_file(const std::filesystem::path& path, const SparseMatrix& A) { write_to(path, A); }
void write_file(const std::filesystem::path& path, const DenseMatrix& X) { write_to(path, X); }

SparseMatrix read_sparse_file(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_sparse(is);
}

DenseMatrix read_dense_file(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_dense(is);
}

} // namespace gadi::mm
