#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fogsim/ids.hpp"
#include "fogsim/time.hpp"
#include "fogsim/topology.hpp"

namespace fogsim {

struct ResponseRecord {
  std::uint64_t request = 0;
  PlayerId player;
  SimTime issued_at = 0;
  SimTime completed_at = 0;
};

/// Half-open interval [start, end) over request issue times.
struct Window {
  SimTime start = 0;
  SimTime end = 0;
  friend bool operator==(const Window&, const Window&) = default;
  bool contains(SimTime t) const { return t >= start && t < end; }
};

using LinkKey = std::pair<NodeId, NodeId>;
using LinkTraffic = std::map<LinkKey, Bytes>;

struct MetricsReport {
  std::string scenario;
  std::size_t user_count = 0;
  Window window;
  std::optional<SimTime> mean_response;  // absent when no responses
  std::uint64_t response_count = 0;
  std::uint64_t dropped_count = 0;
  std::uint64_t issued_count = 0;
  std::uint64_t in_flight_count = 0;
  LinkTraffic link_traffic;
  Bytes edge_cloud_bytes = 0;  // both directions on links touching a cloud server

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

struct ComparisonReport {
  std::size_t user_count = 0;
  SimTime mean_cloud = 0;
  SimTime mean_fog = 0;
  Bytes edge_cloud_bytes_cloud = 0;
  Bytes edge_cloud_bytes_fog = 0;
  double rt_improvement_pct = 0.0;
  double traffic_reduction_pct = 0.0;
};

/// Round-half-up integer mean of sum/count.
SimTime rounded_mean(std::int64_t sum, std::uint64_t count);

class MetricsStore {
 public:
  /// Registers every directed link of the topology as a traffic counter.
  explicit MetricsStore(const Topology& topology);
  explicit MetricsStore(std::vector<LinkKey> links);

  void record_issue(std::uint64_t request, SimTime issued_at);
  void record_drop(std::uint64_t request, SimTime issued_at);
  /// Throws DuplicateRequestId, or InvalidArgument when completed < issued.
  void record_response(std::uint64_t request, PlayerId player, SimTime issued_at, SimTime completed_at);
  /// Throws EmptyWindow when no record was issued within the window.
  SimTime mean_response_time(Window window) const;
  /// Throws UnknownLink, or InvalidArgument for zero bytes.
  void add_traffic(NodeId src, NodeId dst, Bytes bytes);

  const std::vector<ResponseRecord>& responses() const { return records_; }
  const LinkTraffic& link_traffic() const { return traffic_; }

  /// Summary over the window; edge_cloud_bytes sums links incident to a cloud.
  MetricsReport report(std::string scenario, std::size_t user_count, Window window, const Topology& topology) const;

 private:
  std::vector<ResponseRecord> records_;
  std::unordered_map<std::uint64_t, std::size_t> by_request_;
  std::vector<SimTime> issued_;
  std::vector<SimTime> dropped_;
  LinkTraffic traffic_;
};

/// Bytes on links with a cloud server at one end (the edge <-> cloud segment).
Bytes edge_cloud_bytes(const LinkTraffic& traffic, const Topology& topology);

/// Percent improvement of fog over cloud-only for response time and
/// edge<->cloud traffic. Throws MismatchedScenarios or ZeroDenominator.
ComparisonReport compare(const MetricsReport& cloud_report, const MetricsReport& fog_report);

/// `scenario,users,mean_response_us,responses,dropped,link_src,link_dst,bytes`:
/// a summary row with empty link fields followed by one row per link.
void write_metrics_csv(std::ostream& os, const MetricsReport& report, bool header = true);

}  // namespace fogsim
