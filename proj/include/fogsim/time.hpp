#pragma once

#include <cstdint>

namespace fogsim {

/// Simulation time in integer microseconds since scenario start.
using SimTime = std::int64_t;

/// Byte counts on the wire.
using Bytes = std::uint64_t;

constexpr SimTime microseconds(std::int64_t us) { return us; }
constexpr SimTime milliseconds(std::int64_t ms) { return ms * 1'000; }
constexpr SimTime seconds(std::int64_t s) { return s * 1'000'000; }

}  // namespace fogsim
