#include "fogsim/metrics.hpp"

#include <ostream>

#include "fogsim/error.hpp"

namespace fogsim {

SimTime rounded_mean(std::int64_t sum, std::uint64_t count) {
  if (count == 0) throw Error(ErrorCode::EmptyWindow, "mean of zero samples");
  const auto n = static_cast<std::int64_t>(count);
  return (2 * sum + n) / (2 * n);
}

MetricsStore::MetricsStore(const Topology& topology) {
  for (const auto& l : topology.links()) traffic_.emplace(LinkKey{l.src, l.dst}, 0);
}

MetricsStore::MetricsStore(std::vector<LinkKey> links) {
  for (const auto& key : links) traffic_.emplace(key, 0);
}

void MetricsStore::record_issue(std::uint64_t, SimTime issued_at) { issued_.push_back(issued_at); }

void MetricsStore::record_drop(std::uint64_t, SimTime issued_at) { dropped_.push_back(issued_at); }

void MetricsStore::record_response(std::uint64_t request, PlayerId player, SimTime issued_at, SimTime completed_at) {
  if (completed_at < issued_at) {
    throw Error(ErrorCode::InvalidArgument, "request " + std::to_string(request) + " completed before it was issued");
  }
  if (!by_request_.emplace(request, records_.size()).second) {
    throw Error(ErrorCode::DuplicateRequestId, "request " + std::to_string(request) + " recorded twice");
  }
  records_.push_back(ResponseRecord{request, player, issued_at, completed_at});
}

SimTime MetricsStore::mean_response_time(Window window) const {
  std::int64_t sum = 0;
  std::uint64_t count = 0;
  for (const auto& r : records_) {
    if (!window.contains(r.issued_at)) continue;
    sum += r.completed_at - r.issued_at;
    ++count;
  }
  if (count == 0) {
    throw Error(ErrorCode::EmptyWindow, "no responses issued in [" + std::to_string(window.start) + ", " +
                                            std::to_string(window.end) + ")");
  }
  return rounded_mean(sum, count);
}

void MetricsStore::add_traffic(NodeId src, NodeId dst, Bytes bytes) {
  if (bytes == 0) throw Error(ErrorCode::InvalidArgument, "traffic increments must be positive");
  auto it = traffic_.find({src, dst});
  if (it == traffic_.end()) {
    throw Error(ErrorCode::UnknownLink, "no link " + std::to_string(src.value) + "->" + std::to_string(dst.value));
  }
  it->second += bytes;
}

Bytes edge_cloud_bytes(const LinkTraffic& traffic, const Topology& topology) {
  Bytes total = 0;
  for (const auto& [key, bytes] : traffic) {
    if (topology.node(key.first).kind == NodeKind::CloudServer ||
        topology.node(key.second).kind == NodeKind::CloudServer) {
      total += bytes;
    }
  }
  return total;
}

MetricsReport MetricsStore::report(std::string scenario, std::size_t user_count, Window window,
                                   const Topology& topology) const {
  MetricsReport r;
  r.scenario = std::move(scenario);
  r.user_count = user_count;
  r.window = window;
  std::int64_t sum = 0;
  for (const auto& rec : records_) {
    if (!window.contains(rec.issued_at)) continue;
    sum += rec.completed_at - rec.issued_at;
    ++r.response_count;
  }
  if (r.response_count > 0) r.mean_response = rounded_mean(sum, r.response_count);
  for (auto t : issued_) r.issued_count += window.contains(t) ? 1 : 0;
  for (auto t : dropped_) r.dropped_count += window.contains(t) ? 1 : 0;
  r.in_flight_count = r.issued_count - r.response_count - r.dropped_count;
  r.link_traffic = traffic_;
  r.edge_cloud_bytes = edge_cloud_bytes(traffic_, topology);
  return r;
}

ComparisonReport compare(const MetricsReport& cloud_report, const MetricsReport& fog_report) {
  if (cloud_report.user_count != fog_report.user_count || !(cloud_report.window == fog_report.window)) {
    throw Error(ErrorCode::MismatchedScenarios, "reports differ in user count or window");
  }
  if (!cloud_report.mean_response || *cloud_report.mean_response == 0 || !fog_report.mean_response) {
    throw Error(ErrorCode::ZeroDenominator, "response-time comparison needs responses in both runs");
  }
  if (cloud_report.edge_cloud_bytes == 0) {
    throw Error(ErrorCode::ZeroDenominator, "baseline moved no edge<->cloud traffic");
  }
  ComparisonReport c;
  c.user_count = cloud_report.user_count;
  c.mean_cloud = *cloud_report.mean_response;
  c.mean_fog = *fog_report.mean_response;
  c.edge_cloud_bytes_cloud = cloud_report.edge_cloud_bytes;
  c.edge_cloud_bytes_fog = fog_report.edge_cloud_bytes;
  c.rt_improvement_pct =
      100.0 * static_cast<double>(c.mean_cloud - c.mean_fog) / static_cast<double>(c.mean_cloud);
  c.traffic_reduction_pct = 100.0 *
                            (static_cast<double>(c.edge_cloud_bytes_cloud) - static_cast<double>(c.edge_cloud_bytes_fog)) /
                            static_cast<double>(c.edge_cloud_bytes_cloud);
  return c;
}

void write_metrics_csv(std::ostream& os, const MetricsReport& report, bool header) {
  if (header) os << "scenario,users,mean_response_us,responses,dropped,link_src,link_dst,bytes\n";
  const auto prefix = [&] {
    os << report.scenario << ',' << report.user_count << ',';
    if (report.mean_response) os << *report.mean_response;
    os << ',' << report.response_count << ',' << report.dropped_count << ',';
  };
  prefix();
  os << ",,\n";
  for (const auto& [key, bytes] : report.link_traffic) {
    prefix();
    os << key.first.value << ',' << key.second.value << ',' << bytes << '\n';
  }
}

}  // namespace fogsim
