#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fogsim/ids.hpp"
#include "fogsim/time.hpp"

namespace fogsim {

enum class NodeKind {
  UserDevice,
  TrafficRoutingEdge,
  CapabilityAddedEdge,
  PeerNode,
  CloudServer,
};

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> parse_node_kind(std::string_view text);

/// True for the kinds that can serve devices directly.
bool is_edge_kind(NodeKind kind);

struct Node {
  NodeId id;
  NodeKind kind = NodeKind::UserDevice;
  std::uint32_t level = 0;
  SimTime service_time = 0;
  std::optional<std::uint32_t> capacity;   // nullopt: unbounded
  std::optional<std::uint32_t> max_queue;  // nullopt: unbounded FIFO
  std::string name;
};

/// Directed link. Bandwidth in bytes/second; nullopt means no transmission delay.
struct Link {
  NodeId src;
  NodeId dst;
  SimTime one_way_latency = 0;
  std::optional<std::uint64_t> bandwidth;

  friend bool operator==(const Link&, const Link&) = default;
};

using Path = std::vector<Link>;

/// Bidirectional link declaration; expands to two directed links.
struct LinkSpec {
  NodeId a;
  NodeId b;
  SimTime latency = 0;
  std::optional<SimTime> reverse_latency;  // b -> a when asymmetric
  std::optional<std::uint64_t> bandwidth;
};

struct TopologySpec {
  std::vector<Node> nodes;
  std::vector<LinkSpec> links;
  std::map<NodeId, NodeId> device_assignment;  // device -> edge
};

class Topology {
 public:
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const std::map<NodeId, NodeId>& device_assignment() const { return assignment_; }
  std::uint32_t levels() const { return levels_; }

  bool contains(NodeId id) const { return index_.contains(id); }
  const Node& node(NodeId id) const;
  const Link* find_link(NodeId src, NodeId dst) const;

  /// The edge a device is attached to.
  NodeId assigned_edge(NodeId device) const;
  /// Next hop toward the cloud; nullopt for cloud servers.
  std::optional<NodeId> parent(NodeId id) const;
  /// The cloud server at the top of the node's ancestor chain.
  NodeId cloud_of(NodeId id) const;

  std::vector<NodeId> nodes_of_kind(NodeKind kind) const;
  /// Same-level neighbours reachable over peer links, in link declaration order.
  std::vector<NodeId> peers_of(NodeId id) const;

 private:
  friend Topology build_topology(const TopologySpec& spec);

  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::map<NodeId, NodeId> assignment_;
  std::uint32_t levels_ = 0;
  std::unordered_map<NodeId, std::size_t> index_;
  std::map<std::pair<NodeId, NodeId>, std::size_t> link_index_;
  std::unordered_map<NodeId, NodeId> parent_;
};

/// Validates the spec and builds an immutable topology.
/// Throws Error{DuplicateId | LevelViolation | MissingPath | InvalidArgument}.
Topology build_topology(const TopologySpec& spec);

/// Hierarchical route: climb from both ends one level at a time and cross at
/// the lowest level where the two ancestor chains meet (common ancestor) or
/// are joined by a same-level peer link. Empty iff src == dst.
Path route(const Topology& topology, NodeId src, NodeId dst);

/// Exact integer sum of one-way latencies. Throws DiscontiguousPath.
SimTime path_latency(const Topology& topology, const Path& path);

/// Re-checks every structural invariant of a built topology; returns the
/// violated ones (empty when valid).
std::vector<std::string> check_invariants(const Topology& topology);

}  // namespace fogsim
