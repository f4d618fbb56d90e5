#include "fogsim/topology.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "fogsim/error.hpp"

namespace fogsim {

namespace {

std::string describe(const Node& n) {
  std::ostringstream os;
  os << to_string(n.kind) << ' ' << n.id;
  if (!n.name.empty()) os << " (" << n.name << ')';
  return os.str();
}

}  // namespace

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::UserDevice: return "device";
    case NodeKind::TrafficRoutingEdge: return "routing_edge";
    case NodeKind::CapabilityAddedEdge: return "capability_edge";
    case NodeKind::PeerNode: return "peer";
    case NodeKind::CloudServer: return "cloud";
  }
  return "unknown";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) {
  for (auto kind : {NodeKind::UserDevice, NodeKind::TrafficRoutingEdge, NodeKind::CapabilityAddedEdge,
                    NodeKind::PeerNode, NodeKind::CloudServer}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

bool is_edge_kind(NodeKind kind) {
  return kind == NodeKind::TrafficRoutingEdge || kind == NodeKind::CapabilityAddedEdge ||
         kind == NodeKind::PeerNode;
}

const Node& Topology::node(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw Error(ErrorCode::InvalidArgument, "unknown node " + std::to_string(id.value));
  }
  return nodes_[it->second];
}

const Link* Topology::find_link(NodeId src, NodeId dst) const {
  auto it = link_index_.find({src, dst});
  return it == link_index_.end() ? nullptr : &links_[it->second];
}

NodeId Topology::assigned_edge(NodeId device) const {
  auto it = assignment_.find(device);
  if (it == assignment_.end()) {
    throw Error(ErrorCode::MissingPath, "device " + std::to_string(device.value) + " has no assigned edge");
  }
  return it->second;
}

std::optional<NodeId> Topology::parent(NodeId id) const {
  auto it = parent_.find(id);
  if (it == parent_.end()) return std::nullopt;
  return it->second;
}

NodeId Topology::cloud_of(NodeId id) const {
  NodeId cur = id;
  while (auto up = parent(cur)) cur = *up;
  return cur;
}

std::vector<NodeId> Topology::nodes_of_kind(NodeKind kind) const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.kind == kind) out.push_back(n.id);
  }
  return out;
}

std::vector<NodeId> Topology::peers_of(NodeId id) const {
  const auto level = node(id).level;
  std::vector<NodeId> out;
  for (const auto& l : links_) {
    if (l.src == id && node(l.dst).level == level) out.push_back(l.dst);
  }
  return out;
}

Topology build_topology(const TopologySpec& spec) {
  Topology t;
  t.nodes_ = spec.nodes;

  std::uint32_t max_level = 0;
  for (std::size_t i = 0; i < t.nodes_.size(); ++i) {
    const auto& n = t.nodes_[i];
    if (!t.index_.emplace(n.id, i).second) {
      throw Error(ErrorCode::DuplicateId, "node id " + std::to_string(n.id.value) + " declared twice");
    }
    if (n.service_time < 0) {
      throw Error(ErrorCode::InvalidArgument, describe(n) + " has negative service time");
    }
    if (n.capacity && *n.capacity == 0) {
      throw Error(ErrorCode::InvalidArgument, describe(n) + " has zero capacity");
    }
    max_level = std::max(max_level, n.level);
  }
  if (t.nodes_.empty()) throw Error(ErrorCode::MissingPath, "topology has no nodes");
  if (max_level == 0) throw Error(ErrorCode::LevelViolation, "topology needs at least two levels");
  t.levels_ = max_level + 1;

  bool has_cloud = false;
  for (const auto& n : t.nodes_) {
    const bool top = n.level == max_level;
    if (n.kind == NodeKind::CloudServer) {
      has_cloud = true;
      if (!top) throw Error(ErrorCode::LevelViolation, describe(n) + " is below the top level");
    } else if (top) {
      throw Error(ErrorCode::LevelViolation, describe(n) + " shares the top level with the cloud");
    }
    if (n.kind == NodeKind::UserDevice && n.level != 0) {
      throw Error(ErrorCode::LevelViolation, describe(n) + " must be at level 0");
    }
    if ((n.kind == NodeKind::TrafficRoutingEdge || n.kind == NodeKind::CapabilityAddedEdge) && n.level == 0) {
      throw Error(ErrorCode::LevelViolation, describe(n) + " cannot sit at the device level");
    }
  }
  if (!has_cloud) throw Error(ErrorCode::MissingPath, "topology has no cloud server");

  auto add_link = [&](NodeId src, NodeId dst, SimTime latency, std::optional<std::uint64_t> bw) {
    if (src == dst) throw Error(ErrorCode::InvalidArgument, "self link on node " + std::to_string(src.value));
    if (!t.contains(src) || !t.contains(dst)) {
      throw Error(ErrorCode::MissingPath,
                  "link " + std::to_string(src.value) + "->" + std::to_string(dst.value) + " names an unknown node");
    }
    if (latency < 0) throw Error(ErrorCode::InvalidArgument, "negative link latency");
    if (bw && *bw == 0) throw Error(ErrorCode::InvalidArgument, "zero link bandwidth");
    const auto& a = t.node(src);
    const auto& b = t.node(dst);
    const auto gap = a.level > b.level ? a.level - b.level : b.level - a.level;
    if (gap > 1) {
      throw Error(ErrorCode::LevelViolation, "link " + describe(a) + " -> " + describe(b) + " skips a level");
    }
    if (gap == 0 && a.kind != NodeKind::PeerNode && b.kind != NodeKind::PeerNode) {
      throw Error(ErrorCode::LevelViolation,
                  "same-level link " + describe(a) + " -> " + describe(b) + " without a peer node");
    }
    if (!t.link_index_.emplace(std::pair{src, dst}, t.links_.size()).second) {
      throw Error(ErrorCode::DuplicateId,
                  "link " + std::to_string(src.value) + "->" + std::to_string(dst.value) + " declared twice");
    }
    t.links_.push_back(Link{src, dst, latency, bw});
  };
  for (const auto& ls : spec.links) {
    add_link(ls.a, ls.b, ls.latency, ls.bandwidth);
    add_link(ls.b, ls.a, ls.reverse_latency.value_or(ls.latency), ls.bandwidth);
  }

  for (const auto& [device, edge] : spec.device_assignment) {
    if (!t.contains(device) || t.node(device).kind != NodeKind::UserDevice) {
      throw Error(ErrorCode::InvalidArgument, "assignment for non-device " + std::to_string(device.value));
    }
    if (!t.contains(edge)) {
      throw Error(ErrorCode::MissingPath, "device " + std::to_string(device.value) + " assigned to unknown edge");
    }
    const auto& e = t.node(edge);
    if (!is_edge_kind(e.kind) || e.level != 1) {
      throw Error(ErrorCode::LevelViolation, "device " + std::to_string(device.value) +
                                                 " assigned to " + describe(e) + ", not a level-1 edge");
    }
  }
  t.assignment_ = spec.device_assignment;

  // Parent pointers: devices follow their assignment, everything else its
  // unique upward link.
  for (const auto& n : t.nodes_) {
    if (n.kind == NodeKind::CloudServer) continue;
    if (n.kind == NodeKind::UserDevice) {
      auto it = t.assignment_.find(n.id);
      if (it == t.assignment_.end()) throw Error(ErrorCode::MissingPath, describe(n) + " has no assigned edge");
      if (!t.find_link(n.id, it->second) || !t.find_link(it->second, n.id)) {
        throw Error(ErrorCode::MissingPath, describe(n) + " has no link to its assigned edge");
      }
      t.parent_[n.id] = it->second;
      continue;
    }
    std::optional<NodeId> up;
    for (const auto& l : t.links_) {
      if (l.src != n.id || t.node(l.dst).level != n.level + 1) continue;
      if (up) throw Error(ErrorCode::LevelViolation, describe(n) + " has more than one upward link");
      up = l.dst;
    }
    if (!up) throw Error(ErrorCode::MissingPath, describe(n) + " has no upward link toward the cloud");
    t.parent_[n.id] = *up;
  }
  // Every chain climbs one level per hop, so it terminates at the top level,
  // which only clouds occupy.
  return t;
}

Path route(const Topology& topology, NodeId src, NodeId dst) {
  if (!topology.contains(src) || !topology.contains(dst)) {
    throw Error(ErrorCode::InvalidArgument, "route endpoint is not in the topology");
  }
  Path path;
  if (src == dst) return path;

  // Ancestor chains indexed by level; the route bridges at the lowest level
  // where the chains meet or are joined by a peer link.
  auto chain = [&](NodeId start) {
    std::vector<NodeId> c{start};
    while (auto up = topology.parent(c.back())) c.push_back(*up);
    return c;
  };
  const auto up_chain = chain(src);
  const auto down_chain = chain(dst);
  const auto src_level = topology.node(src).level;
  const auto dst_level = topology.node(dst).level;

  for (auto level = std::max(src_level, dst_level); level < topology.levels(); ++level) {
    const std::size_t ui = level - src_level;
    const std::size_t di = level - dst_level;
    if (ui >= up_chain.size() || di >= down_chain.size()) break;
    const NodeId a = up_chain[ui];
    const NodeId b = down_chain[di];
    const Link* bridge = a == b ? nullptr : topology.find_link(a, b);
    if (a != b && !bridge) continue;
    for (std::size_t i = 0; i < ui; ++i) path.push_back(*topology.find_link(up_chain[i], up_chain[i + 1]));
    if (bridge) path.push_back(*bridge);
    for (std::size_t i = di; i > 0; --i) path.push_back(*topology.find_link(down_chain[i], down_chain[i - 1]));
    return path;
  }
  throw Error(ErrorCode::Unreachable,
              "no common ancestor or peer link joins " + std::to_string(src.value) + " and " + std::to_string(dst.value));
}

SimTime path_latency(const Topology& topology, const Path& path) {
  SimTime total = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0 && path[i - 1].dst != path[i].src) {
      throw Error(ErrorCode::DiscontiguousPath, "hop " + std::to_string(i) + " does not start where hop " +
                                                    std::to_string(i - 1) + " ends");
    }
    if (!topology.find_link(path[i].src, path[i].dst)) {
      throw Error(ErrorCode::UnknownLink, "hop " + std::to_string(i) + " is not a topology link");
    }
    total += path[i].one_way_latency;
  }
  return total;
}

std::vector<std::string> check_invariants(const Topology& topology) {
  std::vector<std::string> violations;
  std::uint32_t max_level = 0;
  std::unordered_set<NodeId> seen;
  for (const auto& n : topology.nodes()) {
    if (!seen.insert(n.id).second) violations.push_back("duplicate node id " + std::to_string(n.id.value));
    max_level = std::max(max_level, n.level);
    if (n.service_time < 0) violations.push_back(describe(n) + ": negative service time");
    if (n.capacity && *n.capacity < 1) violations.push_back(describe(n) + ": capacity below 1");
  }
  if (topology.levels() != max_level + 1) violations.push_back("level count mismatch");
  for (const auto& n : topology.nodes()) {
    if (n.kind == NodeKind::UserDevice && n.level != 0) violations.push_back(describe(n) + ": device off level 0");
    if (n.kind == NodeKind::CloudServer && n.level != max_level) {
      violations.push_back(describe(n) + ": cloud off the top level");
    }
  }
  for (const auto& l : topology.links()) {
    if (l.src == l.dst) violations.push_back("self link");
    if (!topology.contains(l.src) || !topology.contains(l.dst)) {
      violations.push_back("dangling link");
      continue;
    }
    const auto& a = topology.node(l.src);
    const auto& b = topology.node(l.dst);
    const auto gap = a.level > b.level ? a.level - b.level : b.level - a.level;
    if (gap > 1) violations.push_back("link " + describe(a) + " -> " + describe(b) + " skips a level");
    if (gap == 0 && a.kind != NodeKind::PeerNode && b.kind != NodeKind::PeerNode) {
      violations.push_back("same-level link without a peer node");
    }
    if (l.one_way_latency < 0) violations.push_back("negative latency");
  }
  for (const auto& n : topology.nodes()) {
    if (n.kind != NodeKind::UserDevice) continue;
    auto it = topology.device_assignment().find(n.id);
    if (it == topology.device_assignment().end()) {
      violations.push_back(describe(n) + ": no assigned edge");
      continue;
    }
    if (!topology.find_link(n.id, it->second)) violations.push_back(describe(n) + ": no link to assigned edge");
  }
  for (const auto& n : topology.nodes()) {
    // Walk up; every step must climb one level and end at a cloud.
    NodeId cur = n.id;
    std::uint32_t steps = 0;
    while (auto up = topology.parent(cur)) {
      if (!topology.find_link(cur, *up) || topology.node(*up).level != topology.node(cur).level + 1) {
        violations.push_back(describe(n) + ": broken upward chain");
        break;
      }
      cur = *up;
      if (++steps > topology.levels()) {
        violations.push_back(describe(n) + ": cyclic upward chain");
        break;
      }
    }
    if (topology.node(cur).kind != NodeKind::CloudServer) violations.push_back(describe(n) + ": no path to a cloud");
  }
  return violations;
}

}  // namespace fogsim
