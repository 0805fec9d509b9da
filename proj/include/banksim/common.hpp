/*
 * common.hpp
 *
 * Base types shared across the simulator: addresses, cycle counts, tile
 * coordinates and the error type used for configuration and simulation
 * diagnostics.
 */

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace banksim {

using Addr = uint32_t;
using Word = uint32_t;
using Cycle = uint64_t;

constexpr unsigned kAddressBits = 32;

struct TileCoord {
  int x = 0;
  int y = 0;

  bool operator==(const TileCoord&) const = default;
  auto operator<=>(const TileCoord&) const = default;
};

inline int manhattan(TileCoord a, TileCoord b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

inline std::string to_string(TileCoord t) {
  return std::to_string(t.x) + "," + std::to_string(t.y);
}

constexpr bool isPow2(unsigned v) { return v != 0 && (v & (v - 1)) == 0; }

constexpr unsigned ilog2(unsigned v) {
  unsigned r = 0;
  while (v > 1) {
    v >>= 1;
    ++r;
  }
  return r;
}

// Thrown for malformed configuration or trace input. line == 0 means the
// error is not tied to a specific line.
class ConfigError : public std::runtime_error {
public:
  ConfigError(unsigned line, const std::string& msg)
      : std::runtime_error(line ? ("line " + std::to_string(line) + ": " + msg)
                                : msg),
        line_(line) {}

  unsigned line() const { return line_; }

private:
  unsigned line_;
};

// Thrown for runtime simulation faults: deadlock/livelock watchdog expiry,
// sends on torn-down connections, trace/configuration mismatches discovered
// mid-run.
class SimError : public std::runtime_error {
public:
  explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace banksim
