#include "fogsim/placement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "fogsim/error.hpp"

namespace fogsim {

namespace {

constexpr std::uint64_t kPpm = 1'000'000;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string describe(const Predicate& p) {
  std::ostringstream os;
  switch (p.test) {
    case Predicate::Test::Always: os << "always"; break;
    case Predicate::Test::RequestBytesAbove: os << "request_bytes_above " << p.threshold; break;
    case Predicate::Test::RequestBytesAtMost: os << "request_bytes_at_most " << p.threshold; break;
    case Predicate::Test::EdgeKindIs: os << "edge_kind " << to_string(p.kind); break;
  }
  return os.str();
}

// Smooth weighted round-robin: one full cycle of member indices in which
// every prefix stays within one slot of its proportional share.
const std::vector<std::uint32_t>& weighted_cycle(const std::vector<std::uint64_t>& weights) {
  thread_local std::map<std::vector<std::uint64_t>, std::vector<std::uint32_t>> cache;
  auto [it, inserted] = cache.try_emplace(weights);
  if (!inserted) return it->second;
  const auto total = static_cast<std::int64_t>(std::accumulate(weights.begin(), weights.end(), std::uint64_t{0}));
  std::vector<std::int64_t> current(weights.size(), 0);
  auto& order = it->second;
  order.reserve(static_cast<std::size_t>(total));
  for (std::int64_t step = 0; step < total; ++step) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      current[i] += static_cast<std::int64_t>(weights[i]);
      if (current[i] > current[best]) best = i;
    }
    current[best] -= total;
    order.push_back(static_cast<std::uint32_t>(best));
  }
  return order;
}

NodeId share_target(SharePolicy policy, const GpsUpdate& request, const Topology& topology) {
  const NodeId edge = topology.assigned_edge(request.device);
  std::vector<std::pair<NodeId, std::uint64_t>> group{{edge, 0}};
  for (auto peer : topology.peers_of(edge)) {
    if (topology.node(peer).kind == NodeKind::PeerNode) group.emplace_back(peer, 0);
  }
  if (policy == SharePolicy::RoundRobin) return group[request.player.value % group.size()].first;

  // Weight by capacity; unbounded nodes count as the largest bounded one.
  std::uint64_t widest = 1;
  for (auto& [id, w] : group) {
    if (auto cap = topology.node(id).capacity) widest = std::max<std::uint64_t>(widest, *cap);
  }
  std::uint64_t g = 0;
  for (auto& [id, w] : group) {
    w = topology.node(id).capacity.value_or(static_cast<std::uint32_t>(widest));
    g = std::gcd(g, w);
  }
  std::vector<std::uint64_t> weights;
  for (auto& [id, w] : group) weights.push_back(w / g);
  const auto& order = weighted_cycle(weights);
  return group[order[request.player.value % order.size()]].first;
}

}  // namespace

bool Predicate::matches(const GpsUpdate& request, const Topology& topology) const {
  switch (test) {
    case Test::Always: return true;
    case Test::RequestBytesAbove: return request.request_bytes > threshold;
    case Test::RequestBytesAtMost: return request.request_bytes <= threshold;
    case Test::EdgeKindIs: return topology.node(topology.assigned_edge(request.device)).kind == kind;
  }
  return false;
}

std::string describe(const ExecutionModel& model) {
  return std::visit(
      Overloaded{
          [](const CloudOnly&) -> std::string { return "cloud_only"; },
          [](const OffloadDeviceToEdge&) -> std::string { return "offload_device_to_edge"; },
          [](const OffloadCloudToEdge&) -> std::string { return "offload_cloud_to_edge"; },
          [](const Aggregate& a) -> std::string {
            std::ostringstream os;
            os << "aggregate(filter_ratio=" << a.filter_ratio << ", batch_window_us=" << a.batch_window << ')';
            return os.str();
          },
          [](const Share& s) -> std::string {
            return s.policy == SharePolicy::RoundRobin ? "share(round_robin)" : "share(capacity_weighted)";
          },
          [](const Hybrid& h) -> std::string {
            std::string out = "hybrid[";
            for (std::size_t i = 0; i < h.rules.size(); ++i) {
              if (i) out += "; ";
              out += describe(h.rules[i].when) + " -> " + describe(h.rules[i].model);
            }
            return out + "]";
          },
      },
      model);
}

void validate_model(const ExecutionModel& model) {
  std::visit(Overloaded{
                 [](const Aggregate& a) {
                   if (!(a.filter_ratio >= 0.0 && a.filter_ratio <= 1.0)) {
                     throw Error(ErrorCode::InvalidModel, "filter_ratio must lie in [0, 1]");
                   }
                   if (a.batch_window <= 0) throw Error(ErrorCode::InvalidModel, "batch_window must be positive");
                 },
                 [](const Hybrid& h) {
                   if (h.rules.empty()) throw Error(ErrorCode::InvalidModel, "hybrid model has no rules");
                   if (h.rules.back().when.test != Predicate::Test::Always) {
                     throw Error(ErrorCode::InvalidModel, "hybrid model must end with a catch-all rule");
                   }
                   for (const auto& r : h.rules) validate_model(r.model);
                 },
                 [](const auto&) {},
             },
             model);
}

const ExecutionModel& resolve_model(const ExecutionModel& model, const GpsUpdate& request, const Topology& topology) {
  if (const auto* hybrid = std::get_if<Hybrid>(&model)) {
    for (const auto& rule : hybrid->rules) {
      if (rule.when.matches(request, topology)) return resolve_model(rule.model, request, topology);
    }
    throw Error(ErrorCode::InvalidModel, "no hybrid rule matched");
  }
  return model;
}

NodeId place_request(const ExecutionModel& model, const GpsUpdate& request, const Topology& topology) {
  if (!topology.contains(request.device)) {
    throw Error(ErrorCode::InvalidArgument, "request device " + std::to_string(request.device.value) + " unknown");
  }
  const auto& leaf = resolve_model(model, request, topology);
  return std::visit(Overloaded{
                        [&](const CloudOnly&) { return topology.cloud_of(request.device); },
                        [&](const Share& s) { return share_target(s.policy, request, topology); },
                        [&](const auto&) { return topology.assigned_edge(request.device); },
                    },
                    leaf);
}

AggregatedMessage aggregate_batch(std::span<const SensorReading> readings, double filter_ratio, Bytes header_bytes) {
  if (readings.empty()) throw Error(ErrorCode::EmptyBatch, "aggregate_batch needs at least one reading");
  if (!(filter_ratio >= 0.0 && filter_ratio <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "filter_ratio must lie in [0, 1]");
  }
  Bytes payload = 0;
  for (const auto& r : readings) {
    if (r.payload_bytes == 0) throw Error(ErrorCode::InvalidArgument, "reading with empty payload");
    payload += r.payload_bytes;
  }
  const auto keep_ppm = kPpm - static_cast<std::uint64_t>(std::llround(filter_ratio * static_cast<double>(kPpm)));
  // ceil(keep_ppm * payload / 1e6) without overflow for payloads below ~1.8e13 bytes.
  const Bytes kept = (keep_ppm * payload + kPpm - 1) / kPpm;
  return AggregatedMessage{header_bytes + kept, readings.size(), payload};
}

void BatchBuffer::add(SensorReading reading) { readings_.push_back(reading); }

AggregatedMessage BatchBuffer::close(double filter_ratio, Bytes header_bytes) {
  auto msg = aggregate_batch(readings_, filter_ratio, header_bytes);
  readings_.clear();
  return msg;
}

ShareAssignment share_assign(std::size_t tasks, std::span<const std::pair<NodeId, std::uint64_t>> peers,
                             SharePolicy policy) {
  if (peers.empty()) throw Error(ErrorCode::NoPeers, "share_assign needs at least one peer");
  ShareAssignment out;
  out.loads.assign(peers.size(), 0);
  out.task_to_peer.reserve(tasks);

  if (policy == SharePolicy::RoundRobin) {
    for (std::size_t i = 0; i < tasks; ++i) {
      const auto p = i % peers.size();
      out.task_to_peer.push_back(peers[p].first);
      ++out.loads[p];
    }
    return out;
  }

  std::uint64_t total = 0;
  for (const auto& [id, w] : peers) {
    if (w == 0) throw Error(ErrorCode::InvalidArgument, "capacity weights must be positive");
    total += w;
  }
  // Exact share of peer i is tasks * w_i / total: integer floor plus remainder.
  std::vector<std::uint64_t> remainder(peers.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < peers.size(); ++i) {
    if (peers[i].second > UINT64_MAX / std::max<std::uint64_t>(tasks, 1)) {
      throw Error(ErrorCode::InvalidArgument, "task count times weight overflows");
    }
    const std::uint64_t scaled = static_cast<std::uint64_t>(tasks) * peers[i].second;
    out.loads[i] = static_cast<std::size_t>(scaled / total);
    remainder[i] = scaled % total;
    assigned += out.loads[i];
  }
  std::vector<std::size_t> order(peers.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < tasks; ++k, ++assigned) ++out.loads[order[k]];

  for (std::size_t i = 0; i < peers.size(); ++i) {
    out.task_to_peer.insert(out.task_to_peer.end(), out.loads[i], peers[i].first);
  }
  return out;
}

ServerQueue::ServerQueue(SimTime service_time, std::optional<std::uint32_t> capacity,
                         std::optional<std::uint32_t> max_queue)
    : service_time_(service_time), capacity_(capacity), max_queue_(max_queue) {
  if (service_time < 0) throw Error(ErrorCode::InvalidArgument, "negative service time");
  if (capacity && *capacity == 0) throw Error(ErrorCode::InvalidArgument, "capacity must be at least 1");
  if (capacity) {
    for (std::uint32_t i = 0; i < *capacity; ++i) free_at_.push(0);
  }
}

std::optional<SimTime> ServerQueue::admit(SimTime arrival) {
  if (arrival < last_arrival_) throw Error(ErrorCode::InvalidArgument, "arrivals must be offered in time order");
  last_arrival_ = arrival;
  if (!capacity_) {
    ++served_;
    return arrival + service_time_;
  }
  while (!waiting_starts_.empty() && waiting_starts_.front() <= arrival) waiting_starts_.pop_front();

  const SimTime start = std::max(arrival, free_at_.top());
  if (start > arrival && max_queue_ && waiting_starts_.size() >= *max_queue_) {
    ++dropped_;
    return std::nullopt;
  }
  free_at_.pop();
  free_at_.push(start + service_time_);
  if (start > arrival) waiting_starts_.push_back(start);
  ++served_;
  return start + service_time_;
}

SimTime ServerQueue::queue_and_serve(SimTime arrival) {
  if (auto done = admit(arrival)) return *done;
  throw Error(ErrorCode::QueueOverflow, "waiting line full at " + std::to_string(arrival) + " us");
}

}  // namespace fogsim
