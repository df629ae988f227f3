#include "gazenli/tsv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gazenli/errors.hpp"

namespace gazenli::tsv {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<Row> read_rows(std::ifstream& in, const std::string& path,
                           std::vector<std::string>* header_out) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("missing header in " + path, 1);
  }
  *header_out = split_tabs(strip_cr(line));

  std::vector<Row> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    rows.push_back(Row{line_no, split_tabs(line)});
  }
  return rows;
}

}  // namespace

std::vector<Row> read_file(const std::string& path,
                           const std::vector<std::string>& header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  std::vector<std::string> got;
  std::vector<Row> rows = read_rows(in, path, &got);
  if (got != header) {
    std::string want;
    for (const auto& h : header) want += (want.empty() ? "" : "\t") + h;
    throw ParseError("bad header in " + path + ", expected: " + want, 1);
  }
  for (const Row& r : rows) {
    if (r.cells.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) +
                           " columns, got " + std::to_string(r.cells.size()) +
                           " in " + path,
                       r.line);
    }
  }
  return rows;
}

RaggedFile read_file_any_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  RaggedFile f;
  f.rows = read_rows(in, path, &f.header);
  return f;
}

void write_file(const std::string& path,
                const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << '\t';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << '\t';
      out << row[i];
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

std::int64_t parse_int(const std::string& cell, std::size_t line,
                       const std::string& what) {
  std::int64_t value = 0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || cell.empty()) {
    throw ParseError("bad integer for " + what + ": '" + cell + "'", line);
  }
  return value;
}

double parse_real(const std::string& cell, std::size_t line,
                  const std::string& what) {
  if (cell.empty()) {
    throw ParseError("empty value for " + what, line);
  }
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError("bad number for " + what + ": '" + cell + "'", line);
  }
  return value;
}

std::size_t utf8_length(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;  // count non-continuation bytes
  }
  return n;
}

std::string format_fixed(double v, int digits) {
  std::array<char, 64> buf{};
  int n = std::snprintf(buf.data(), buf.size(), "%.*f", digits, v);
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

std::string format_full(double v) {
  std::array<char, 64> buf{};
  int n = std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::uint64_t h = 1469598103934665603ull;  // FNV offset basis
  char chunk[4096];
  while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(chunk[i]);
      h *= 1099511628211ull;  // FNV prime
    }
    if (!in) break;
  }
  std::array<char, 17> hex{};
  std::snprintf(hex.data(), hex.size(), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(hex.data(), 16);
}

}  // namespace gazenli::tsv
