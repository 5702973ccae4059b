#include "erfmin/cli_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace erfmin {

namespace {

[[noreturn]] void parse_fail(const std::string& path, long line, const std::string& msg) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_double(const std::string& path, long line, const std::string& tok) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) parse_fail(path, line, "invalid numeric value '" + tok + "'");
    return v;
  } catch (const std::invalid_argument&) {
    parse_fail(path, line, "invalid numeric value '" + tok + "'");
  } catch (const std::out_of_range&) {
    parse_fail(path, line, "numeric value out of range '" + tok + "'");
  }
}

long parse_index(const std::string& path, long line, const std::string& tok) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size()) parse_fail(path, line, "invalid integer '" + tok + "'");
    return v;
  } catch (const std::invalid_argument&) {
    parse_fail(path, line, "invalid integer '" + tok + "'");
  } catch (const std::out_of_range&) {
    parse_fail(path, line, "integer out of range '" + tok + "'");
  }
}

// Writes content to `path` atomically: stage in a sibling temp file, then rename,
// so a crash never leaves a partial output file behind.
void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    os << content;
    os.flush();
    if (!os) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot rename temporary file onto '" + path + "'");
  }
}

}  // namespace

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& content) {
  atomic_write(path, content);
}

Eigen::MatrixXd read_matrix(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "' for reading");

  std::string line;
  long lineno = 0;

  if (!std::getline(is, line)) parse_fail(path, 1, "empty file; expected MatrixMarket header");
  ++lineno;
  auto header = split_ws(line);
  if (header.size() < 5 || header[0] != "%%MatrixMarket")
    parse_fail(path, lineno, "malformed header; expected '%%MatrixMarket matrix <format> <field> <symmetry>'");
  if (lower(header[1]) != "matrix")
    parse_fail(path, lineno, "unsupported object '" + header[1] + "'; expected matrix");
  const std::string format = lower(header[2]);
  if (format != "array" && format != "coordinate")
    parse_fail(path, lineno, "unsupported format '" + header[2] + "'; expected array or coordinate");
  const std::string field = lower(header[3]);
  if (field != "real")
    parse_fail(path, lineno, "unsupported field '" + header[3] + "'; only real matrices are handled");
  if (lower(header[4]) != "general")
    parse_fail(path, lineno, "unsupported symmetry '" + header[4] + "'; expected general");

  // Size line: first non-comment, non-blank line after the header.
  std::vector<std::string> size_toks;
  long size_line = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    size_toks = split_ws(line);
    if (size_toks.empty()) continue;
    size_line = lineno;
    break;
  }
  if (size_toks.empty()) parse_fail(path, lineno + 1, "missing size line");

  const bool coordinate = (format == "coordinate");
  if (!coordinate && size_toks.size() != 2)
    parse_fail(path, size_line, "array size line must be 'rows cols'");
  if (coordinate && size_toks.size() != 3)
    parse_fail(path, size_line, "coordinate size line must be 'rows cols nnz'");

  const long rows = parse_index(path, size_line, size_toks[0]);
  const long cols = parse_index(path, size_line, size_toks[1]);
  if (rows <= 0 || cols <= 0) parse_fail(path, size_line, "matrix dimensions must be positive");
  if (rows > 100000 || cols > 100000 || rows * cols > 50000000)
    parse_fail(path, size_line, "matrix dimensions too large");

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, cols);

  if (coordinate) {
    const long nnz = parse_index(path, size_line, size_toks[2]);
    if (nnz < 0 || nnz > rows * cols)
      parse_fail(path, size_line, "entry count out of range");
    long seen = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line[0] == '%') continue;
      auto toks = split_ws(line);
      if (toks.empty()) continue;
      if (toks.size() != 3) parse_fail(path, lineno, "coordinate entry must be 'row col value'");
      const long i = parse_index(path, lineno, toks[0]);
      const long j = parse_index(path, lineno, toks[1]);
      if (i < 1 || i > rows || j < 1 || j > cols)
        parse_fail(path, lineno, "entry index out of range");
      A(i - 1, j - 1) = parse_double(path, lineno, toks[2]);
      ++seen;
    }
    if (seen != nnz)
      parse_fail(path, lineno, "expected " + std::to_string(nnz) + " entries, found " + std::to_string(seen));
  } else {
    // Array format: rows*cols values in column-major order, any whitespace layout.
    long count = 0;
    const long total = rows * cols;
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line[0] == '%') continue;
      auto toks = split_ws(line);
      for (const auto& tok : toks) {
        if (count >= total) parse_fail(path, lineno, "more values than rows*cols");
        A(count % rows, count / rows) = parse_double(path, lineno, tok);
        ++count;
      }
    }
    if (count != total)
      parse_fail(path, lineno, "expected " + std::to_string(total) + " values, found " + std::to_string(count));
  }
  return A;
}

Eigen::VectorXd read_vector(const std::string& path) {
  Eigen::MatrixXd A = read_matrix(path);
  if (A.cols() != 1)
    throw std::runtime_error("'" + path + "': expected a single-column vector, got " +
                             std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
  return A.col(0);
}

void write_matrix(const Eigen::MatrixXd& A, const std::string& path) {
  std::string out;
  out.reserve(static_cast<std::size_t>(A.size()) * 20 + 64);
  out += "%%MatrixMarket matrix array real general\n";
  out += std::to_string(A.rows()) + " " + std::to_string(A.cols()) + "\n";
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      out += format_g17(A(i, j));
      out += '\n';
    }
  atomic_write(path, out);
}

void write_vector(const Eigen::VectorXd& v, const std::string& path) {
  write_matrix(v, path);
}

void write_records(const std::vector<PathRecord>& records, const std::string& path) {
  std::string out = "tau,residual_norm,percent_error,f1_value,iterations,wall_seconds\n";
  for (const auto& r : records) {
    out += format_g17(r.tau);
    out += ',';
    out += format_g17(r.residual_norm);
    out += ',';
    if (r.percent_error) out += format_g17(*r.percent_error);
    out += ',';
    out += format_g17(r.f1_value);
    out += ',';
    out += std::to_string(r.iterations);
    out += ',';
    out += format_g17(r.wall_seconds);
    out += '\n';
  }
  atomic_write(path, out);
}

void write_records(const SweepTable& table, const std::string& path) {
  std::string out = "nnz,noise_fraction,solver,median_min_percent_error\n";
  for (const auto& r : table) {
    out += std::to_string(r.nnz);
    out += ',';
    out += format_g17(r.noise_fraction);
    out += ',';
    out += to_string(r.solver);
    out += ',';
    out += format_g17(r.median_min_percent_error);
    out += '\n';
  }
  atomic_write(path, out);
}

void write_trace(const IterateTrace& trace, const std::string& path) {
  std::string out = "iteration,sigma,h_value,f1_value,residual_norm,mu,nnz,beta,ls_fallback\n";
  for (const auto& r : trace) {
    out += std::to_string(r.iteration);
    out += ',';
    out += format_g17(r.sigma);
    out += ',';
    out += format_g17(r.h_value);
    out += ',';
    out += format_g17(r.f1_value);
    out += ',';
    out += format_g17(r.residual_norm);
    out += ',';
    out += format_g17(r.mu);
    out += ',';
    out += std::to_string(r.nnz);
    out += ',';
    out += format_g17(r.beta);
    out += ',';
    out += std::to_string(r.ls_fallback ? 1 : 0);
    out += '\n';
  }
  atomic_write(path, out);
}

}  // namespace erfmin
