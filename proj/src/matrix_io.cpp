#include "dalign/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "dalign/errors.hpp"

namespace dalign {

namespace {

bool is_comment_or_blank(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

double parse_double(const std::string& token) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw Error(ErrorCode::io_error, "bad number '" + token + "'");
  if (!std::isfinite(value)) throw Error(ErrorCode::invalid_input, "non-finite matrix entry '" + token + "'");
  return value;
}

Index parse_count(const std::string& token) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || value < 1)
    throw Error(ErrorCode::io_error, "bad dimension '" + token + "'");
  return static_cast<Index>(value);
}

}  // namespace

MatrixXd read_matrix(std::istream& in) {
  std::string line;
  std::vector<std::string> tokens;
  bool have_header = false;
  Index rows = 0;
  Index cols = 0;
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) continue;
    std::istringstream fields(line);
    std::string token;
    if (!have_header) {
      std::string r, c, extra;
      if (!(fields >> r >> c) || (fields >> extra)) throw Error(ErrorCode::io_error, "header must be 'rows cols'");
      rows = parse_count(r);
      cols = parse_count(c);
      have_header = true;
      continue;
    }
    while (fields >> token) tokens.push_back(token);
  }
  if (!have_header) throw Error(ErrorCode::io_error, "missing 'rows cols' header");
  if (static_cast<Index>(tokens.size()) != rows * cols)
    throw Error(ErrorCode::io_error, "expected " + std::to_string(rows * cols) + " entries, found " +
                                         std::to_string(tokens.size()));
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = parse_double(tokens[static_cast<std::size_t>(i * cols + j)]);
  return m;
}

MatrixXd read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const MatrixXd& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j > 0) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

void write_matrix_file(const std::filesystem::path& path, const MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  write_matrix(out, m);
}

std::string format_shortest(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace dalign
