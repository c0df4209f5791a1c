#include "output.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace erwlab::cli {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw std::logic_error("row width mismatch");
  rows_.push_back(std::move(row));
}

std::string Table::render(Format format) const {
  std::ostringstream os;
  if (format == Format::Csv) {
    for (std::size_t c = 0; c < columns_.size(); ++c) os << (c ? "," : "") << columns_[c];
    os << '\n';
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) os << ',';
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>)
                os << format_double(v);
              else
                os << v;
            },
            row[c]);
      }
      os << '\n';
    }
    return os.str();
  }
  // JSONL: field order follows the CSV columns. Non-finite floats become null.
  for (const auto& row : rows_) {
    os << '{';
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      os << nlohmann::json(columns_[c]).dump() << ':';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
              os << (std::isfinite(v) ? format_double(v) : "null");
            else if constexpr (std::is_same_v<T, std::string>)
              os << nlohmann::json(v).dump();
            else
              os << v;
          },
          row[c]);
    }
    os << "}\n";
  }
  return os.str();
}

std::string file_extension(Format format) { return format == Format::Csv ? ".csv" : ".jsonl"; }

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "jsonl") return Format::Jsonl;
  throw std::invalid_argument("unknown format '" + name + "'");
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << bytes;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json to_json(const WrittenFile& file) {
  return {{"name", file.name}, {"sha256", file.sha256}, {"bytes", file.bytes}};
}

}  // namespace erwlab::cli
