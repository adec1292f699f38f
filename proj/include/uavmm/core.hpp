#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace uavmm {

// Globally unique cell identifier (the ECGI). PCIs are the small reusable
// local identifiers; 504 values in LTE, 1008 in NR.
using Ecgi = std::uint64_t;
using Pci = int;

inline constexpr int kLtePciPoolSize = 504;
inline constexpr int kNrPciPoolSize = 1008;

enum class Tier { Macro, Small };
enum class Rat { NR, LTE };
enum class UeKind { Uav, Gue };
enum class RadioKind { Single, Dual };
enum class RrcMode { Idle, Connected };

// 3GPP Release 15 caps enforced at scenario load.
inline constexpr double kMaxUavSpeedMps = 160.0 / 3.6;          // 160 km/h
inline constexpr double kMaxUavSpeedExtendedMps = 300.0 / 3.6;  // 300 km/h
inline constexpr double kMaxUavAltitudeM = 300.0;

inline const char* to_string(Tier t) { return t == Tier::Macro ? "macro" : "small"; }
inline const char* to_string(Rat r) { return r == Rat::NR ? "nr" : "lte"; }
inline const char* to_string(UeKind k) { return k == UeKind::Uav ? "uav" : "gue"; }
inline const char* to_string(RadioKind r) { return r == RadioKind::Single ? "single" : "dual"; }

// Raised for malformed scenario/trace inputs; the CLI maps it to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace uavmm
