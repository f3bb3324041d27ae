#pragma once

#include <filesystem>

#include "ergoham/field.hpp"

namespace ergoham {

/// Binary field layout "ERGH":
///   4 bytes  magic "ERGH"
///   uint8    version (1)
///   uint8    spatial dimension d
///   uint32   points per axis n
///   uint32   time steps nt (1 for a stationary field)
///   float64  period T
///   nt * n^d float64 values, time outermost, last axis fastest
/// All multi-byte quantities are little-endian.
inline constexpr std::uint8_t kErghVersion = 1;

void write_ergh(const std::filesystem::path& path, const SpaceTimeField& f);
SpaceTimeField read_ergh(const std::filesystem::path& path);

/// Human-readable JSON mirror of the same data (for debugging only).
void write_ergh_sidecar(const std::filesystem::path& path, const SpaceTimeField& f);

} // namespace ergoham
