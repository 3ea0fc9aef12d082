#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bitsmm {

// Base class for all simulator errors.
struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration or arguments (bad widths, dimension mismatch,
// capacity overflow). Raised before any simulation state is touched.
struct ConfigError : SimError {
  using SimError::SimError;
};

// A streaming-protocol contract was broken (toggle at the wrong cadence,
// P2S load mid-word, readout during active computation). Carries the cycle
// index when one is known.
struct ProtocolError : SimError {
  static constexpr std::uint64_t no_cycle = ~std::uint64_t{0};

  explicit ProtocolError(const std::string& what) : SimError(what) {}
  ProtocolError(std::uint64_t at_cycle, const std::string& what)
      : SimError("cycle " + std::to_string(at_cycle) + ": " + what),
        cycle(at_cycle) {}

  std::uint64_t cycle = no_cycle;
};

}  // namespace bitsmm
