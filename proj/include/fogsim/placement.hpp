#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fogsim/protocol.hpp"
#include "fogsim/topology.hpp"

namespace fogsim {

// Execution models -----------------------------------------------------------

struct CloudOnly {
  friend bool operator==(const CloudOnly&, const CloudOnly&) = default;
};
struct OffloadDeviceToEdge {
  friend bool operator==(const OffloadDeviceToEdge&, const OffloadDeviceToEdge&) = default;
};
struct OffloadCloudToEdge {
  friend bool operator==(const OffloadCloudToEdge&, const OffloadCloudToEdge&) = default;
};

/// Edge serves requests and forwards a filtered summary every batch window.
struct Aggregate {
  double filter_ratio = 0.0;  // fraction of payload dropped at the edge
  SimTime batch_window = seconds(1);
  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

enum class SharePolicy { RoundRobin, CapacityWeighted };

/// Requests are spread across the assigned edge and its peer nodes.
struct Share {
  SharePolicy policy = SharePolicy::RoundRobin;
  friend bool operator==(const Share&, const Share&) = default;
};

struct HybridRule;

/// First matching rule wins; the last rule must be a catch-all.
struct Hybrid {
  std::vector<HybridRule> rules;
  friend bool operator==(const Hybrid&, const Hybrid&);
};

using ExecutionModel = std::variant<CloudOnly, OffloadDeviceToEdge, OffloadCloudToEdge, Aggregate, Share, Hybrid>;

struct Predicate {
  enum class Test { Always, RequestBytesAbove, RequestBytesAtMost, EdgeKindIs };
  Test test = Test::Always;
  Bytes threshold = 0;
  NodeKind kind = NodeKind::TrafficRoutingEdge;

  bool matches(const GpsUpdate& request, const Topology& topology) const;
  // Fields a test does not read are ignored.
  friend bool operator==(const Predicate& a, const Predicate& b) {
    if (a.test != b.test) return false;
    if (a.test == Test::EdgeKindIs) return a.kind == b.kind;
    if (a.test == Test::Always) return true;
    return a.threshold == b.threshold;
  }
};

struct HybridRule {
  Predicate when;
  ExecutionModel model;
  friend bool operator==(const HybridRule&, const HybridRule&) = default;
};

inline bool operator==(const Hybrid& a, const Hybrid& b) { return a.rules == b.rules; }

std::string describe(const ExecutionModel& model);

/// Throws InvalidModel for an empty hybrid, a hybrid without a trailing
/// catch-all, a filter ratio outside [0, 1] or a non-positive batch window.
void validate_model(const ExecutionModel& model);

/// The leaf model a request resolves to once hybrid rules are applied.
const ExecutionModel& resolve_model(const ExecutionModel& model, const GpsUpdate& request, const Topology& topology);

/// Node that processes the request. Pure function of its inputs.
NodeId place_request(const ExecutionModel& model, const GpsUpdate& request, const Topology& topology);

// Aggregation ------------------------------------------------------------------

struct SensorReading {
  NodeId sensor;
  Bytes payload_bytes = 0;
  SimTime t = 0;
};

struct AggregatedMessage {
  Bytes bytes = 0;
  std::size_t readings = 0;
  Bytes payload_bytes = 0;
};

/// header + ceil((1 - filter_ratio) * sum(payload)). The ratio is applied in
/// parts per million so the rounding is exact integer arithmetic.
AggregatedMessage aggregate_batch(std::span<const SensorReading> readings, double filter_ratio,
                                  Bytes header_bytes = 32);

/// Readings collected at an edge until the batch window closes.
class BatchBuffer {
 public:
  void add(SensorReading reading);
  bool empty() const { return readings_.empty(); }
  std::size_t size() const { return readings_.size(); }
  /// Aggregates and clears the buffer.
  AggregatedMessage close(double filter_ratio, Bytes header_bytes);

 private:
  std::vector<SensorReading> readings_;
};

// Sharing ----------------------------------------------------------------------

struct ShareAssignment {
  std::vector<NodeId> task_to_peer;
  /// Tasks per peer, in the order the peers were given.
  std::vector<std::size_t> loads;
};

/// RoundRobin deals task i to peer i mod n. CapacityWeighted gives each peer
/// its weighted share rounded by largest remainder (ties to the earlier peer)
/// and assigns contiguous task blocks in peer order.
ShareAssignment share_assign(std::size_t tasks, std::span<const std::pair<NodeId, std::uint64_t>> peers,
                             SharePolicy policy);

// Serving ------------------------------------------------------------------------

/// FIFO server with `capacity` parallel slots and an optional bound on the
/// number of waiting requests. Arrivals must be offered in time order.
class ServerQueue {
 public:
  ServerQueue(SimTime service_time, std::optional<std::uint32_t> capacity,
              std::optional<std::uint32_t> max_queue = std::nullopt);
  explicit ServerQueue(const Node& node) : ServerQueue(node.service_time, node.capacity, node.max_queue) {}

  /// Completion time, or nullopt when the waiting line is full (counted as a drop).
  std::optional<SimTime> admit(SimTime arrival);
  /// As admit(), but throws QueueOverflow on a drop.
  SimTime queue_and_serve(SimTime arrival);

  std::uint64_t dropped() const { return dropped_; }
  std::uint64_t served() const { return served_; }

 private:
  SimTime service_time_;
  std::optional<std::uint32_t> capacity_;
  std::optional<std::uint32_t> max_queue_;
  std::priority_queue<SimTime, std::vector<SimTime>, std::greater<>> free_at_;
  std::deque<SimTime> waiting_starts_;
  SimTime last_arrival_ = 0;
  std::uint64_t dropped_ = 0;
  std::uint64_t served_ = 0;
};

}  // namespace fogsim
