#include "fogsim/simulation.hpp"

#include <algorithm>

#include "fogsim/error.hpp"

namespace fogsim {

namespace {

// Stream ids for Rng::derive; player streams use the player index.
constexpr std::uint64_t kCloudFractionStream = 1ULL << 40;

enum class Flow : std::uint8_t {
  CloudServe,     // served by the cloud, written to the global view
  EdgeSync,       // served at an edge, reaches the cloud through sync deltas
  EdgeStateless,  // device offload, terminates at the edge
  EdgeAggregate,  // served at an edge, forwarded in filtered batches
};

const Aggregate* find_aggregate(const ExecutionModel& model) {
  if (const auto* a = std::get_if<Aggregate>(&model)) return a;
  if (const auto* h = std::get_if<Hybrid>(&model)) {
    for (const auto& r : h->rules) {
      if (const auto* a = find_aggregate(r.model)) return a;
    }
  }
  return nullptr;
}

}  // namespace

std::vector<GpsUpdate> build_workload(const ScenarioConfig& config, std::size_t users) {
  const auto topology_spec = config.topology_for(users);
  std::vector<GpsUpdate> all;
  const auto first_device = topology_spec.nodes.size() - users;
  for (std::size_t i = 0; i < users; ++i) {
    Rng rng(Rng::derive(config.seed, i));
    auto updates = generate_updates(PlayerId{static_cast<std::uint32_t>(i)}, topology_spec.nodes[first_device + i].id,
                                    config.workload.rate, config.horizon, rng, config.workload.arrival,
                                    config.workload.sizes);
    all.insert(all.end(), updates.begin(), updates.end());
  }
  std::stable_sort(all.begin(), all.end(), [](const GpsUpdate& a, const GpsUpdate& b) {
    return a.issued_at != b.issued_at ? a.issued_at < b.issued_at : a.player < b.player;
  });
  return all;
}

struct Simulation::State {
  ScenarioConfig config;
  std::size_t users;
  RunMode mode;
  RunOptions options;
  Topology topology;
  ExecutionModel model;
  std::vector<GpsUpdate> workload;
  std::vector<NodeId> placement;
  std::vector<Flow> flow;
  Engine engine;
  MetricsStore metrics;
  GlobalView global;
  std::map<NodeId, LocalView> local;
  std::map<NodeId, LocalView> aggregate_views;
  std::map<NodeId, BatchBuffer> batches;
  std::map<NodeId, ServerQueue> queues;
  std::map<LinkKey, SimTime> link_busy_until;
  std::map<LinkKey, NodeId> next_hop;
  std::vector<SyncDelta> deltas;
  std::vector<NodeId> delta_dst;
  std::vector<bool> delta_settled;  // applied, rejected or dropped
  SyncStats stats;
  std::optional<Aggregate> aggregate;
  Window window;
  bool ran = false;

  State(const ScenarioConfig& cfg, std::size_t n, RunMode m, RunOptions opts)
      : config(cfg),
        users(n),
        mode(m),
        options(opts),
        topology(build_topology(cfg.topology_for(n))),
        model(m == RunMode::CloudOnly ? ExecutionModel{CloudOnly{}} : cfg.fog_model),
        workload(build_workload(cfg, n)),
        engine({}, opts.record_trace),
        metrics(topology),
        window{cfg.warmup, cfg.horizon} {
    validate_model(model);
    if (const auto* a = find_aggregate(model)) aggregate = *a;
    for (const auto& node : topology.nodes()) {
      if (node.kind != NodeKind::UserDevice) queues.emplace(node.id, ServerQueue(node));
    }
    plan_requests();
    engine.set_handler([this](Engine&, const Event& e) { handle(e); });
  }

  void plan_requests() {
    Rng fraction_rng(Rng::derive(config.seed, kCloudFractionStream));
    placement.reserve(workload.size());
    flow.reserve(workload.size());
    for (const auto& u : workload) {
      // Always draw so the stream position is independent of the model.
      const bool forced_cloud =
          fraction_rng.uniform01() < config.workload.cloud_fraction && mode == RunMode::Fog;
      NodeId target;
      Flow f;
      if (forced_cloud) {
        target = topology.cloud_of(u.device);
        f = Flow::CloudServe;
      } else {
        target = place_request(model, u, topology);
        const auto& leaf = resolve_model(model, u, topology);
        if (topology.node(target).kind == NodeKind::CloudServer) {
          f = Flow::CloudServe;
        } else if (std::holds_alternative<OffloadDeviceToEdge>(leaf)) {
          f = Flow::EdgeStateless;
        } else if (std::holds_alternative<Aggregate>(leaf)) {
          f = Flow::EdgeAggregate;
        } else {
          f = Flow::EdgeSync;
        }
      }
      placement.push_back(target);
      flow.push_back(f);
      if (f == Flow::EdgeSync) {
        auto& view = local[target];
        view.edge = target;
        view.members.insert(u.player);
      } else if (f == Flow::EdgeAggregate) {
        auto& view = aggregate_views[target];
        view.edge = target;
        view.members.insert(u.player);
        batches[target];
      }
    }
  }

  void schedule_initial() {
    for (std::uint64_t id = 0; id < workload.size(); ++id) {
      const auto& u = workload[id];
      engine.schedule(Event{u.issued_at, 0, EventKind::RequestIssue, u.device, u.device, MessageType::Request, id, 0});
    }
    if (config.sync_interval > 0 && config.sync_interval < config.horizon) {
      for (const auto& [edge, view] : local) {
        engine.schedule(Event{config.sync_interval, 0, EventKind::SyncTimer, edge, edge, MessageType::SyncDelta, 0, 0});
      }
    }
    if (aggregate && aggregate->batch_window < config.horizon) {
      for (const auto& [edge, buffer] : batches) {
        engine.schedule(
            Event{aggregate->batch_window, 0, EventKind::SyncTimer, edge, edge, MessageType::Aggregate, 0, 0});
      }
    }
    engine.schedule(Event{config.horizon, 0, EventKind::MeasurementEnd, NodeId{}, NodeId{}, MessageType::None, 0, 0});
  }

  NodeId destination(const Event& e) const {
    switch (e.message) {
      case MessageType::Request: return placement[e.ref];
      case MessageType::Response: return workload[e.ref].device;
      case MessageType::SyncDelta:
      case MessageType::Aggregate: return delta_dst[e.ref];
      case MessageType::None: break;
    }
    throw Error(ErrorCode::InvalidArgument, "event carries no message");
  }

  NodeId hop_toward(NodeId from, NodeId dst) {
    auto [it, inserted] = next_hop.try_emplace({from, dst});
    if (inserted) it->second = route(topology, from, dst).front().dst;
    return it->second;
  }

  void send(MessageType type, std::uint64_t ref, Bytes bytes, NodeId from, NodeId dst) {
    const NodeId next = hop_toward(from, dst);
    const Link* link = topology.find_link(from, next);
    SimTime depart = engine.now();
    SimTime transmit = 0;
    if (link->bandwidth) {
      auto& busy = link_busy_until[{from, next}];
      depart = std::max(depart, busy);
      transmit = static_cast<SimTime>((bytes * 1'000'000 + *link->bandwidth - 1) / *link->bandwidth);
      busy = depart + transmit;
    }
    engine.schedule(Event{depart + transmit + link->one_way_latency, 0, EventKind::MessageArrival, next, from, type,
                          ref, bytes});
  }

  void handle(const Event& e) {
    switch (e.kind) {
      case EventKind::RequestIssue: on_issue(e); break;
      case EventKind::MessageArrival: on_arrival(e); break;
      case EventKind::ServiceComplete: on_service_complete(e); break;
      case EventKind::SyncTimer: on_timer(e); break;
      case EventKind::MeasurementEnd: break;
    }
    if (options.observer) options.observer->on_event(e, global);
  }

  void on_issue(const Event& e) {
    const auto& u = workload[e.ref];
    metrics.record_issue(e.ref, u.issued_at);
    send(MessageType::Request, e.ref, u.request_bytes, u.device, placement[e.ref]);
  }

  void on_arrival(const Event& e) {
    if (e.time >= window.start) metrics.add_traffic(e.from, e.node, e.bytes);
    const NodeId dst = destination(e);
    if (e.node != dst) {
      send(e.message, e.ref, e.bytes, e.node, dst);
      return;
    }
    switch (e.message) {
      case MessageType::Request: {
        const auto done = queues.at(e.node).admit(e.time);
        if (!done) {
          metrics.record_drop(e.ref, workload[e.ref].issued_at);
          return;
        }
        engine.schedule(Event{*done, 0, EventKind::ServiceComplete, e.node, e.node, MessageType::Request, e.ref, 0});
        break;
      }
      case MessageType::Response: {
        const auto& u = workload[e.ref];
        metrics.record_response(e.ref, u.player, u.issued_at, e.time);
        break;
      }
      case MessageType::SyncDelta:
      case MessageType::Aggregate: {
        const auto done = queues.at(e.node).admit(e.time);
        if (!done) {
          ++stats.deltas_dropped;
          delta_settled[e.ref] = true;
          return;
        }
        engine.schedule(Event{*done, 0, EventKind::ServiceComplete, e.node, e.node, e.message, e.ref, 0});
        break;
      }
      case MessageType::None: break;
    }
  }

  void on_service_complete(const Event& e) {
    if (e.message == MessageType::Request) {
      const auto& u = workload[e.ref];
      switch (flow[e.ref]) {
        case Flow::CloudServe: handle_update_cloud(global, u, e.time); break;
        case Flow::EdgeSync: handle_update_edge(local.at(e.node), u, e.time); break;
        case Flow::EdgeAggregate:
          handle_update_edge(aggregate_views.at(e.node), u, e.time);
          batches.at(e.node).add(SensorReading{u.device, u.request_bytes, e.time});
          break;
        case Flow::EdgeStateless: break;
      }
      if (options.observer) options.observer->on_update_served(e.ref, e.node, u, e.time);
      send(MessageType::Response, e.ref, u.response_bytes, e.node, u.device);
      return;
    }
    const auto& delta = deltas[e.ref];
    delta_settled[e.ref] = true;
    try {
      apply_sync_delta(global, delta, e.time);
      ++stats.deltas_applied;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::StaleDelta) throw;
      ++stats.deltas_rejected;
      return;
    }
    if (options.observer) options.observer->on_delta_applied(delta, global, e.time);
  }

  void on_timer(const Event& e) {
    if (e.message == MessageType::SyncDelta) {
      auto& view = local.at(e.node);
      auto delta = build_sync_delta(view, e.time, config.workload.sizes);
      if (options.observer) options.observer->on_delta_built(view, delta);
      dispatch_delta(std::move(delta), MessageType::SyncDelta, e.node);
      if (e.time + config.sync_interval < config.horizon) {
        engine.schedule(Event{e.time + config.sync_interval, 0, EventKind::SyncTimer, e.node, e.node,
                              MessageType::SyncDelta, 0, 0});
      }
      return;
    }
    auto& buffer = batches.at(e.node);
    if (!buffer.empty()) {
      const auto msg = buffer.close(aggregate->filter_ratio, config.workload.sizes.header);
      auto& view = aggregate_views.at(e.node);
      auto delta = build_sync_delta(view, e.time, config.workload.sizes);
      delta.wire_bytes = msg.bytes;
      if (options.observer) options.observer->on_delta_built(view, delta);
      dispatch_delta(std::move(delta), MessageType::Aggregate, e.node);
    }
    if (e.time + aggregate->batch_window < config.horizon) {
      engine.schedule(Event{e.time + aggregate->batch_window, 0, EventKind::SyncTimer, e.node, e.node,
                            MessageType::Aggregate, 0, 0});
    }
  }

  void dispatch_delta(SyncDelta delta, MessageType type, NodeId edge) {
    const std::uint64_t id = deltas.size();
    const NodeId cloud = topology.cloud_of(edge);
    const Bytes bytes = delta.wire_bytes;
    deltas.push_back(std::move(delta));
    delta_dst.push_back(cloud);
    delta_settled.push_back(false);
    ++stats.deltas_sent;
    send(type, id, bytes, edge, cloud);
  }
};

Simulation::Simulation(const ScenarioConfig& config, std::size_t users, RunMode mode, RunOptions options)
    : state_(std::make_unique<State>(config, users, mode, options)) {}

Simulation::~Simulation() = default;

MetricsReport Simulation::run() {
  auto& s = *state_;
  if (s.ran) throw Error(ErrorCode::InvalidArgument, "simulation already ran");
  s.ran = true;
  s.schedule_initial();
  s.engine.run_until(s.config.horizon);
  const char* suffix = s.mode == RunMode::CloudOnly ? "/cloud" : "/fog";
  return s.metrics.report(s.config.name + suffix, s.users, s.window, s.topology);
}

std::vector<SyncDelta> Simulation::flush_sync() {
  auto& s = *state_;
  std::vector<SyncDelta> flushed;
  const SimTime now = s.engine.now();
  // Deltas still in flight already left their edge's dirty set.
  for (std::size_t id = 0; id < s.deltas.size(); ++id) {
    if (s.delta_settled[id]) continue;
    s.delta_settled[id] = true;
    apply_sync_delta(s.global, s.deltas[id], std::max(now, s.deltas[id].built_at));
    flushed.push_back(s.deltas[id]);
  }
  auto flush = [&](std::map<NodeId, LocalView>& views) {
    for (auto& [edge, view] : views) {
      auto delta = build_sync_delta(view, now, s.config.workload.sizes);
      const auto latency = path_latency(s.topology, route(s.topology, edge, s.topology.cloud_of(edge)));
      apply_sync_delta(s.global, delta, now + latency);
      flushed.push_back(std::move(delta));
    }
  };
  flush(s.local);
  flush(s.aggregate_views);
  return flushed;
}

const Topology& Simulation::topology() const { return state_->topology; }
const std::vector<GpsUpdate>& Simulation::workload() const { return state_->workload; }
const std::vector<NodeId>& Simulation::placements() const { return state_->placement; }
const GlobalView& Simulation::global_view() const { return state_->global; }
const std::map<NodeId, LocalView>& Simulation::local_views() const { return state_->local; }
const MetricsStore& Simulation::metrics() const { return state_->metrics; }
const EventTrace& Simulation::trace() const { return state_->engine.trace(); }
const SyncStats& Simulation::sync_stats() const { return state_->stats; }
RunMode Simulation::mode() const { return state_->mode; }

}  // namespace fogsim
