#include "fogsim/protocol.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace fogsim {

namespace {

// Starting area: a ~1 km box around central Belfast.
constexpr Position kOrigin{54'597'300, -5'930'100};
constexpr std::int64_t kSpawnSpread = 4'500;
constexpr std::int64_t kStepSpread = 60;

}  // namespace

std::vector<GpsUpdate> generate_updates(PlayerId player, NodeId device, double rate, SimTime horizon, Rng& rng,
                                        ArrivalProcess process, const MessageSizes& sizes) {
  if (!(rate > 0)) throw Error(ErrorCode::InvalidArgument, "update rate must be positive");
  if (sizes.request == 0 || sizes.response == 0) {
    throw Error(ErrorCode::InvalidArgument, "request and response sizes must be positive");
  }
  std::vector<GpsUpdate> out;
  if (horizon <= 0) return out;

  Position pos{kOrigin.lat + rng.uniform_int(-kSpawnSpread, kSpawnSpread),
               kOrigin.lon + rng.uniform_int(-kSpawnSpread, kSpawnSpread)};
  auto emit = [&](SimTime t) {
    pos.lat += rng.uniform_int(-kStepSpread, kStepSpread);
    pos.lon += rng.uniform_int(-kStepSpread, kStepSpread);
    out.push_back(GpsUpdate{player, device, pos, t, sizes.request, sizes.response});
  };

  if (process == ArrivalProcess::Deterministic) {
    const double interval = 1e6 / rate;
    SimTime prev = -1;
    for (std::int64_t k = 0;; ++k) {
      auto t = static_cast<SimTime>(std::floor(static_cast<double>(k) * interval));
      if (t <= prev) t = prev + 1;
      if (t >= horizon) break;
      emit(t);
      prev = t;
    }
  } else {
    const double per_us = rate / 1e6;
    double clock = 0;
    SimTime prev = -1;
    for (;;) {
      clock += rng.exponential(per_us);
      auto t = static_cast<SimTime>(std::floor(clock));
      if (t <= prev) t = prev + 1;
      if (t >= horizon) break;
      emit(t);
      prev = t;
    }
  }
  return out;
}

Response handle_update_edge(LocalView& view, const GpsUpdate& update, SimTime served_at) {
  if (!view.members.contains(update.player)) {
    throw Error(ErrorCode::ForeignPlayer, "player " + std::to_string(update.player.value) +
                                              " is not served by edge " + std::to_string(view.edge.value));
  }
  view.entries[update.player] = ViewEntry{update.position, served_at};
  view.dirty.insert(update.player);
  return Response{update.player, served_at, update.response_bytes};
}

Response handle_update_cloud(GlobalView& view, const GpsUpdate& update, SimTime served_at) {
  view.entries[update.player] = ViewEntry{update.position, served_at};
  return Response{update.player, served_at, update.response_bytes};
}

SyncDelta build_sync_delta(LocalView& view, SimTime built_at, const MessageSizes& sizes) {
  SyncDelta delta{view.edge, built_at, {}, 0};
  delta.entries.reserve(view.dirty.size());
  for (auto player : view.dirty) {
    const auto& e = view.entries.at(player);
    delta.entries.push_back(DeltaEntry{player, e.position, e.stamp});
  }
  view.dirty.clear();
  delta.wire_bytes = sizes.header + sizes.per_entry * delta.entries.size();
  return delta;
}

void apply_sync_delta(GlobalView& view, const SyncDelta& delta, SimTime applied_at) {
  if (applied_at < delta.built_at) {
    throw Error(ErrorCode::InvalidArgument, "delta applied before it was built");
  }
  if (auto it = view.last_sync.find(delta.edge); it != view.last_sync.end() && delta.built_at < it->second) {
    ++view.rejected_deltas;
    throw Error(ErrorCode::StaleDelta, "delta from edge " + std::to_string(delta.edge.value) + " built at " +
                                           std::to_string(delta.built_at) + " after sync at " +
                                           std::to_string(it->second));
  }
  for (const auto& entry : delta.entries) {
    auto [it, inserted] = view.entries.try_emplace(entry.player, ViewEntry{entry.position, entry.last_update});
    if (!inserted && entry.last_update > it->second.stamp) it->second = ViewEntry{entry.position, entry.last_update};
  }
  view.last_sync[delta.edge] = delta.built_at;
}

void write_view_csv(std::ostream& os, const std::map<PlayerId, ViewEntry>& entries) {
  os << "player,lat,lon,as_of_us\n";
  for (const auto& [player, e] : entries) {
    os << player.value << ',' << e.position.lat << ',' << e.position.lon << ',' << e.stamp << '\n';
  }
}

}  // namespace fogsim
