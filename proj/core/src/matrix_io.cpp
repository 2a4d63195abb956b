#include "graphon/matrix_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "graphon/error.hpp"

namespace graphon::io {

namespace {

constexpr std::array<char, 4> kMagic{'G', 'R', 'L', '1'};

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const int len = std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return std::string(buf.data(), static_cast<std::size_t>(len));
}

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw FormatError("binary matrix: truncated input");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

double parse_double(std::string_view token, std::size_t line) {
  while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
  while (!token.empty() && (token.back() == ' ' || token.back() == '\t' || token.back() == '\r')) {
    token.remove_suffix(1);
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    throw FormatError("csv line " + std::to_string(line) + ": bad number '" + std::string(token) + "'");
  }
  return v;
}

}  // namespace

void write_csv(std::ostream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Matrix read_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      row.push_back(parse_double(rest.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError("csv line " + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  const auto r = static_cast<Index>(rows.size());
  const Index c = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

void write_binary(std::ostream& out, const Matrix& m) {
  if (m.rows() != m.cols()) throw DomainError("write_binary: matrix is not square");
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) put_le<double>(out, m(i, j));
  }
}

Matrix read_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw FormatError("binary matrix: missing GRL1 magic");
  }
  const auto n = static_cast<Index>(get_le<std::uint32_t>(in));
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) m(i, j) = get_le<double>(in);
  }
  return m;
}

void write_edge_list(std::ostream& out, const Adjacency& a) {
  for (Index i = 0; i < a.size(); ++i) {
    for (Index j = i + 1; j < a.size(); ++j) {
      if (a(i, j) != 0.0) out << (i + 1) << ' ' << (j + 1) << '\n';
    }
  }
}

Adjacency read_edge_list(std::istream& in, std::optional<Index> n) {
  std::vector<std::pair<long long, long long>> edges;
  std::string line;
  std::size_t line_no = 0;
  long long max_index = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long i = 0;
    long long j = 0;
    if (!(fields >> i)) continue;
    if (!(fields >> j) || i < 1 || j < 1) {
      throw FormatError("edge list line " + std::to_string(line_no) + ": expected two 1-based indices");
    }
    if (i == j) throw FormatError("edge list line " + std::to_string(line_no) + ": self-loop");
    max_index = std::max({max_index, i, j});
    edges.emplace_back(i - 1, j - 1);
  }
  const Index size = n.value_or(static_cast<Index>(max_index));
  if (max_index > size) throw FormatError("edge list: index exceeds n");
  Matrix m = Matrix::Zero(size, size);
  for (auto [i, j] : edges) {
    m(static_cast<Index>(i), static_cast<Index>(j)) = 1.0;
    m(static_cast<Index>(j), static_cast<Index>(i)) = 1.0;
  }
  return Adjacency(std::move(m));
}

MatrixFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return MatrixFormat::Csv;
  if (ext == ".grl" || ext == ".bin") return MatrixFormat::Binary;
  if (ext == ".edges" || ext == ".txt") return MatrixFormat::EdgeList;
  throw FormatError("cannot infer matrix format from '" + path.string() + "'");
}

void save_matrix(const std::filesystem::path& path, const Matrix& m) {
  const auto format = format_from_path(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  switch (format) {
    case MatrixFormat::Csv:
      write_csv(out, m);
      break;
    case MatrixFormat::Binary:
      write_binary(out, m);
      break;
    case MatrixFormat::EdgeList:
      write_edge_list(out, Adjacency(m));
      break;
  }
}

Matrix load_matrix(const std::filesystem::path& path) {
  const auto format = format_from_path(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  switch (format) {
    case MatrixFormat::Csv:
      return read_csv(in);
    case MatrixFormat::Binary:
      return read_binary(in);
    case MatrixFormat::EdgeList:
      return read_edge_list(in).matrix();
  }
  return {};
}

void save_adjacency(const std::filesystem::path& path, const Adjacency& a) {
  save_matrix(path, a.matrix());
}

Adjacency load_adjacency(const std::filesystem::path& path, std::optional<Index> n) {
  if (format_from_path(path) == MatrixFormat::EdgeList) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    return read_edge_list(in, n);
  }
  return Adjacency(load_matrix(path));
}

}  // namespace graphon::io
