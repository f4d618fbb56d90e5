#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "fogsim/engine.hpp"
#include "fogsim/metrics.hpp"
#include "fogsim/placement.hpp"
#include "fogsim/protocol.hpp"
#include "fogsim/scenario.hpp"
#include "fogsim/topology.hpp"

namespace fogsim {

/// Every player's update stream merged and ordered by (issue time, player);
/// the index of an update is its request id. Depends only on the config
/// and the user count, so cloud-only and fog runs see the same arrivals.
std::vector<GpsUpdate> build_workload(const ScenarioConfig& config, std::size_t users);

/// Hooks for tests and tooling. Called synchronously from event handlers.
class Observer {
 public:
  virtual ~Observer() = default;
  /// After the event has been handled.
  virtual void on_event(const Event&, const GlobalView&) {}
  /// `node` finished serving request `request`.
  virtual void on_update_served(std::uint64_t /*request*/, NodeId /*node*/, const GpsUpdate&, SimTime /*served_at*/) {}
  /// `view` is the edge view right after the delta was cut from it.
  virtual void on_delta_built(const LocalView&, const SyncDelta&) {}
  virtual void on_delta_applied(const SyncDelta&, const GlobalView&, SimTime /*applied_at*/) {}
};

struct RunOptions {
  bool record_trace = false;
  Observer* observer = nullptr;
};

enum class RunMode { CloudOnly, Fog };

struct SyncStats {
  std::uint64_t deltas_sent = 0;
  std::uint64_t deltas_applied = 0;
  std::uint64_t deltas_rejected = 0;
  std::uint64_t deltas_dropped = 0;
};

/// One scenario run: a topology, a workload and an execution model driven by
/// one engine. Cloud-only mode ignores the configured fog model.
class Simulation {
 public:
  Simulation(const ScenarioConfig& config, std::size_t users, RunMode mode, RunOptions options = {});
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Runs to the horizon; returns the report over [warmup, horizon).
  MetricsReport run();

  /// Delivers deltas still in flight, then pushes every edge's pending dirty
  /// set straight into the global view. Returns the deltas applied.
  std::vector<SyncDelta> flush_sync();

  const Topology& topology() const;
  const std::vector<GpsUpdate>& workload() const;
  /// Node each request was sent to.
  const std::vector<NodeId>& placements() const;
  const GlobalView& global_view() const;
  const std::map<NodeId, LocalView>& local_views() const;
  const MetricsStore& metrics() const;
  const EventTrace& trace() const;
  const SyncStats& sync_stats() const;
  RunMode mode() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace fogsim
