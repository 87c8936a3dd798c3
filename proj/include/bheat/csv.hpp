#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace bheat::csv {

/// 17 significant digits; round-trips through strtod.
std::string full(double v);
/// 6 significant digits, for human-facing tables.
std::string sig6(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws std::runtime_error if absent.
  std::size_t column(const std::string& name) const;
};

/// Comma-separated, no quoting (fields never contain commas).
void write(const std::filesystem::path& path, const Table& table);
Table read(const std::filesystem::path& path);

/// key=value lines; '#' starts a comment.
void write_kv(const std::filesystem::path& path, const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> read_kv(const std::filesystem::path& path);

}  // namespace bheat::csv
