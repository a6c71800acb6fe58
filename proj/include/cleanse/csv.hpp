#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cleanse::csv {

/// Shortest decimal form that parses back to the same double. NaN and
/// infinities are written as "nan", "inf", "-inf".
std::string format_double(double value);
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::vector<std::string> split(std::string_view line, char sep = ',');
std::string join(const std::vector<std::string>& fields, char sep = ',');

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws if absent.
  std::size_t column(std::string_view name) const;
};

Table parse(std::string_view text, const std::string& origin);
std::string render(const Table& table);

Table read_file(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

/// Writes via a temporary sibling file and rename, so readers never see a
/// partially written file.
void write_text_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace cleanse::csv
