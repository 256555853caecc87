#include "fracsync/path_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fracsync/errors.hpp"

namespace fracsync {
namespace {

constexpr std::array<char, 4> kMagic{'F', 'S', 'N', 'P'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  if (!in) throw std::runtime_error("path binary: truncated input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

void write_path_csv(std::ostream& out, const NoisePath& path) {
  out << "t";
  for (int c = 1; c <= path.dim(); ++c) out << ",x_" << c;
  out << "\n";
  for (std::size_t k = 0; k < path.size(); ++k) {
    out << format_double(path.grid().time(k));
    for (double v : path.at(k)) out << ',' << format_double(v);
    out << "\n";
  }
}

NoisePath read_path_csv(std::istream& in, NoiseKind kind, double hurst) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("path csv: missing header");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "t") throw std::runtime_error("path csv: header must start with t,x_1");
  const int dim = static_cast<int>(header.size()) - 1;
  for (int c = 1; c <= dim; ++c) {
    if (header[static_cast<std::size_t>(c)] != "x_" + std::to_string(c)) {
      throw std::runtime_error("path csv: unexpected column '" + header[static_cast<std::size_t>(c)] + "'");
    }
  }
  std::vector<double> times, values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) throw std::runtime_error("path csv: ragged row");
    times.push_back(std::stod(fields[0]));
    for (std::size_t c = 1; c < fields.size(); ++c) values.push_back(std::stod(fields[c]));
  }
  if (times.empty()) throw std::runtime_error("path csv: no rows");
  std::size_t zero = times.size();
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] == 0.0) zero = k;
  }
  if (zero == times.size()) throw std::runtime_error("path csv: no node at t = 0");
  double dt = 1.0;
  if (times.size() > 1) dt = zero + 1 < times.size() ? times[zero + 1] : -times[zero - 1];
  const auto first = -static_cast<std::int64_t>(zero);
  const auto last = static_cast<std::int64_t>(times.size() - 1 - zero);
  return NoisePath(Grid(dt, first, last), dim, kind, hurst, std::move(values));
}

void write_path_binary(std::ostream& out, const NoisePath& path) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint16_t>(out, kVersion);
  put_le<double>(out, path.grid().dt());
  put_le<std::int64_t>(out, path.grid().first());
  put_le<std::int64_t>(out, path.grid().last());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(path.dim()));
  put_le<std::uint8_t>(out, path.kind() == NoiseKind::wiener ? 0 : 1);
  put_le<double>(out, path.hurst());
  for (double v : path.values()) put_le<double>(out, v);
}

NoisePath read_path_binary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("path binary: bad magic (expected FSNP)");
  const auto version = get_le<std::uint16_t>(in);
  if (version != kVersion) throw std::runtime_error("path binary: unsupported version " + std::to_string(version));
  const auto dt = get_le<double>(in);
  const auto first = get_le<std::int64_t>(in);
  const auto last = get_le<std::int64_t>(in);
  const auto dim = get_le<std::uint32_t>(in);
  const auto kind = get_le<std::uint8_t>(in);
  const auto hurst = get_le<double>(in);
  if (dim == 0 || dim > 1024 || kind > 1) throw std::runtime_error("path binary: corrupt header");
  const Grid grid(dt, first, last);
  std::vector<double> values(grid.size() * dim);
  for (double& v : values) v = get_le<double>(in);
  return NoisePath(grid, static_cast<int>(dim), kind == 0 ? NoiseKind::wiener : NoiseKind::fractional, hurst,
                   std::move(values));
}

void save_path(const std::filesystem::path& file, const NoisePath& path) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  if (file.extension() == ".csv") {
    write_path_csv(out, path);
  } else {
    write_path_binary(out, path);
  }
}

NoisePath load_path(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  return read_path_binary(in);
}

}  // namespace fracsync
