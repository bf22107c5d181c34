#pragma once

// Versioned CSV tables. Layout:
//
//   # nsac-csv <schema> v<version>
//   # <free comment lines: timestamps, runtimes>
//   col_a,col_b,...
//   1.5,2,...
//
// Numbers use the shortest decimal that round-trips a double. Anything that
// changes between otherwise identical runs goes into `#` lines only.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nsac {

std::string format_double(double v);
/// Throws Error(Format) naming `what` on malformed input.
double parse_double(std::string_view s, std::string_view what = "value");
std::string format_hash(std::uint64_t h);

struct CsvTable {
  std::string schema;
  int version = 1;
  std::vector<std::string> comments;  ///< without the leading "# "
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
  std::vector<double> numbers(std::string_view name) const;
  void add_row(std::vector<std::string> row);
};

/// Current version of each known schema; 0 if unknown.
int schema_version(std::string_view schema);

std::string to_text(const CsvTable& t, bool timestamp = true);
void write_csv(const std::filesystem::path& path, const CsvTable& t, bool timestamp = true);
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);
/// Throws Error(Format) unless the table carries `schema` at its current version.
void expect_schema(const CsvTable& t, std::string_view schema);

/// Drops `#` lines, for comparing payloads.
std::string csv_payload(std::string_view text);

}  // namespace nsac
