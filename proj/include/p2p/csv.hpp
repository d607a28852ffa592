// Minimal delimited-text helpers shared by the file formats.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2p {

/// Malformed input file; the message names the file and line where known.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvRecord {
  std::size_t line = 0;  // 1-based line number in the source
  std::vector<std::string> fields;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRecord> records;

  /// Column position of `name`, or -1.
  int column(const std::string& name) const;
};

/// Splits on commas and trims surrounding whitespace. No quoting.
std::vector<std::string> split_fields(const std::string& line);

/// Reads a file with a header row; blank lines and lines starting with '#'
/// are skipped.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::istream& in, const std::string& source);

double parse_number(const std::string& text, const std::string& where);
long parse_integer(const std::string& text, const std::string& where);

/// Fixed, locale-independent number formatting for data files.
std::string format_number(double v);

}  // namespace p2p
