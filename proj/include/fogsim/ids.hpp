#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

namespace fogsim {

struct NodeId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

/// One player per user device.
struct PlayerId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(PlayerId, PlayerId) = default;
};

inline std::ostream& operator<<(std::ostream& os, NodeId id) { return os << id.value; }
inline std::ostream& operator<<(std::ostream& os, PlayerId id) { return os << id.value; }

}  // namespace fogsim

template <>
struct std::hash<fogsim::NodeId> {
  std::size_t operator()(fogsim::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};

template <>
struct std::hash<fogsim::PlayerId> {
  std::size_t operator()(fogsim::PlayerId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
