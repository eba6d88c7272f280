#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace qkg::cli {

// Writes via a sibling temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

// Minimal CSV table; cells are quoted only when needed.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Shortest round-trip text for a double.
std::string fmt(double v);

std::string sha256_hex(const std::string& data);
std::string utc_timestamp();

}  // namespace qkg::cli
