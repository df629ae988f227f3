#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gazenli::tsv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the source file
  std::vector<std::string> cells;
};

/// Reads a whole TSV file. Validates the header against `header` exactly
/// (names and order). Returns data rows only; blank trailing lines are
/// ignored. Throws ParseError / IoError.
std::vector<Row> read_file(const std::string& path,
                           const std::vector<std::string>& header);

/// As read_file, but rows may have any column count >= 1 (used for the
/// typology table whose header is data-dependent). Returns header + rows.
struct RaggedFile {
  std::vector<std::string> header;
  std::vector<Row> rows;
};
RaggedFile read_file_any_header(const std::string& path);

/// Writes rows with "\t" separators and "\n" line endings, header first.
void write_file(const std::string& path,
                const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);

/// Strict base-10 integer parse of a whole cell; throws ParseError.
std::int64_t parse_int(const std::string& cell, std::size_t line,
                       const std::string& what);

/// Strict real parse ('.' decimal point); throws ParseError.
double parse_real(const std::string& cell, std::size_t line,
                  const std::string& what);

/// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(const std::string& s);

/// Fixed-format decimal with `digits` fractional digits.
std::string format_fixed(double v, int digits);

/// Shortest representation that round-trips a double exactly.
std::string format_full(double v);

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex chars. Used for
/// manifest input fingerprints; not a cryptographic hash.
std::string file_digest(const std::string& path);

}  // namespace gazenli::tsv
