#pragma once

#include <filesystem>
#include <iosfwd>

#include "fracsync/noise_path.hpp"

namespace fracsync {

/// Columnar CSV: header `t,x_1,...,x_d`, one row per node, values printed
/// with 17 significant digits so that reading back is exact. The grid is
/// recovered exactly from the rows at t = 0 and the neighbouring node.
void write_path_csv(std::ostream& out, const NoisePath& path);
NoisePath read_path_csv(std::istream& in, NoiseKind kind, double hurst);

/// Compact binary format:
///   "FSNP" | u16 version | f64 dt | i64 first | i64 last | u32 dim |
///   u8 kind | f64 hurst | f64 values[size * dim]
/// All fields little-endian.
void write_path_binary(std::ostream& out, const NoisePath& path);
NoisePath read_path_binary(std::istream& in);

void save_path(const std::filesystem::path& file, const NoisePath& path);
NoisePath load_path(const std::filesystem::path& file);

}  // namespace fracsync
