#include "fracsync/output.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <unistd.h>

#include "fracsync/errors.hpp"

#ifndef FRACSYNC_VERSION
#define FRACSYNC_VERSION "unknown"
#endif

namespace fracsync {

std::string artifact_version() { return "fracsync " FRACSYNC_VERSION; }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& config) {
  nlohmann::json tree = to_json(config);
  tree.erase("threads");
  tree.erase("output_dir");
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(tree.dump());
  return out.str();
}

void write_atomic(const std::filesystem::path& file, std::string_view content) {
  std::filesystem::path tmp = file;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, file, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto '" + file.string() + "': " + ec.message());
  }
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

CsvTable::CsvTable(std::vector<std::string> header) : width_(header.size()) {
  require(width_ > 0, "csv: empty header");
  row(header);
  rows_ = 0;
}

CsvTable& CsvTable::row(const std::vector<std::string>& fields) {
  require(fields.size() == width_, "csv: row width differs from header");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) text_ += ',';
    text_ += csv_field(fields[i]);
  }
  text_ += "\r\n";
  ++rows_;
  return *this;
}

CsvTable& CsvTable::row(const std::vector<double>& values) {
  std::vector<std::string> fields;
  fields.reserve(values.size());
  for (double v : values) fields.push_back(format_double(v));
  return row(fields);
}

std::string CsvTable::str() const { return text_; }

RunDirectory::RunDirectory(const ExperimentConfig& config, std::string subcommand)
    : config_(config), subcommand_(std::move(subcommand)) {
  path_ = std::filesystem::path(config.output_dir) / (subcommand_ + "-" + config_hash(config));
  std::filesystem::create_directories(path_);
}

void RunDirectory::write_report(const std::string& name, nlohmann::json report) const {
  report["config"] = to_json(config_);
  report["version"] = artifact_version();
  report["subcommand"] = subcommand_;
  write_atomic(path_ / name, report.dump(2) + "\n");
}

void RunDirectory::write_csv(const std::string& name, const CsvTable& table) const {
  write_atomic(path_ / name, table.str());
}

void RunDirectory::write_meta(double wall_seconds, int threads) const {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::ostringstream stamp;
  stamp << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
  const nlohmann::json meta{{"timestamp", stamp.str()},
                            {"wall_seconds", wall_seconds},
                            {"threads", threads},
                            {"version", artifact_version()},
                            {"subcommand", subcommand_}};
  write_atomic(path_ / "meta.json", meta.dump(2) + "\n");
}

}  // namespace fracsync
