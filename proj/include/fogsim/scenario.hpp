#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fogsim/placement.hpp"
#include "fogsim/protocol.hpp"
#include "fogsim/topology.hpp"

namespace fogsim {

struct NodeDecl {
  std::string name;
  NodeKind kind = NodeKind::TrafficRoutingEdge;
  std::uint32_t level = 1;
  SimTime service_time = 0;
  std::optional<std::uint32_t> capacity;
  std::optional<std::uint32_t> max_queue;
  friend bool operator==(const NodeDecl&, const NodeDecl&) = default;
};

struct LinkDecl {
  std::string a;
  std::string b;
  SimTime latency = 0;
  std::optional<SimTime> reverse_latency;
  std::optional<std::uint64_t> bandwidth;
  friend bool operator==(const LinkDecl&, const LinkDecl&) = default;
};

/// How generated user devices attach: round-robin over `attach`.
struct DeviceTemplate {
  std::vector<std::string> attach;
  SimTime latency = 0;
  std::optional<SimTime> reverse_latency;
  std::optional<std::uint64_t> bandwidth;
  friend bool operator==(const DeviceTemplate&, const DeviceTemplate&) = default;
};

struct WorkloadSpec {
  double rate = 5.0;  // updates per second per player
  ArrivalProcess arrival = ArrivalProcess::Poisson;
  MessageSizes sizes;
  double cloud_fraction = 0.0;  // fog runs only: share of requests still sent to the cloud
  friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  SimTime horizon = seconds(300);
  SimTime warmup = 0;
  SimTime sync_interval = seconds(1);  // 0 disables edge->cloud sync
  std::size_t users = 10;
  std::vector<std::size_t> user_counts{1, 5, 10, 25, 50, 100};
  std::vector<NodeDecl> nodes;
  std::vector<LinkDecl> links;
  DeviceTemplate devices;
  WorkloadSpec workload;
  ExecutionModel fog_model = OffloadCloudToEdge{};

  /// Declared nodes take ids 0..k-1 in file order; `users` devices follow.
  TopologySpec topology_for(std::size_t users) const;
  /// Checks every config invariant and builds the topology for `users`.
  /// Throws ValidationError naming the violated invariant.
  void validate(std::size_t users) const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parses the scenario grammar. Throws ParseError (with line and field) or
/// ValidationError.
ScenarioConfig parse_scenario(std::string_view text, std::string_view origin = "<string>");
/// Reads and parses a scenario file. Throws IoError when unreadable.
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Renders a config in the scenario grammar; parse_scenario(format_scenario(c)) == c.
std::string format_scenario(const ScenarioConfig& config);

/// Integer microseconds from `<number><unit>`, unit one of us, ms, s.
/// Decimal fractions are exact down to one microsecond.
std::optional<SimTime> parse_duration(std::string_view text);
/// Shortest exact rendering of a duration (e.g. 300s, 12ms, 1500us).
std::string format_duration(SimTime t);

}  // namespace fogsim
