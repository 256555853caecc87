#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fracsync/config.hpp"

namespace fracsync {

/// Version string embedded in every report.
std::string artifact_version();

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// Hash of the resolved config, ignoring fields that do not change results
/// (thread count, output directory).
std::string config_hash(const ExperimentConfig& config);

/// Writes `content` to a sibling temp file, then renames it over `file`.
void write_atomic(const std::filesystem::path& file, std::string_view content);

/// Shortest text that parses back to the same double.
std::string format_double(double value);

/// One RFC 4180 field: quoted when it holds a comma, quote or line break.
std::string csv_field(std::string_view text);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& row(const std::vector<std::string>& fields);
  CsvTable& row(const std::vector<double>& values);
  std::string str() const;
  std::size_t rows() const noexcept { return rows_; }

 private:
  std::size_t width_;
  std::size_t rows_ = 0;
  std::string text_;
};

/// One directory per invocation: <output_dir>/<subcommand>-<config hash>.
class RunDirectory {
 public:
  RunDirectory(const ExperimentConfig& config, std::string subcommand);

  const std::filesystem::path& path() const noexcept { return path_; }

  /// Adds "config", "version" and "subcommand" to `report` and writes it.
  void write_report(const std::string& name, nlohmann::json report) const;
  void write_csv(const std::string& name, const CsvTable& table) const;
  /// Timestamped sidecar; the only file that differs between reruns.
  void write_meta(double wall_seconds, int threads) const;

 private:
  const ExperimentConfig& config_;
  std::string subcommand_;
  std::filesystem::path path_;
};

}  // namespace fracsync
