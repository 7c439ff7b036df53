#pragma once

namespace conetract {

inline constexpr const char* kVersion = "0.1.0";

/// Fixed default for every sampling seed; never time-based so that reports
/// reproduce byte-identically.
inline constexpr unsigned long long kDefaultSeed = 20240801ULL;

}  // namespace conetract
