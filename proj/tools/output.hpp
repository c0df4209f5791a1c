#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace erwlab::cli {

using Cell = std::variant<std::int64_t, double, std::string>;

enum class Format { Csv, Jsonl };

/// Column-ordered result table written as CSV (header row) or JSONL (one
/// object per row with the same field names).
class Table {
public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add(std::vector<Cell> row);
  std::string render(Format format) const;
  std::size_t rows() const noexcept { return rows_.size(); }

private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// Round-trip float formatting: 17 significant digits.
std::string format_double(double x);

std::string file_extension(Format format);
Format parse_format(const std::string& name);

std::string sha256_hex(const std::string& bytes);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

std::string utc_timestamp();

struct WrittenFile {
  std::string name;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

nlohmann::json to_json(const WrittenFile& file);

}  // namespace erwlab::cli
