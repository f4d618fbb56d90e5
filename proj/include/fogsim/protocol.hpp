#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <unordered_set>
#include <vector>

#include "fogsim/engine.hpp"
#include "fogsim/ids.hpp"
#include "fogsim/time.hpp"

namespace fogsim {

/// Latitude/longitude in integer microdegrees.
struct Position {
  std::int64_t lat = 0;
  std::int64_t lon = 0;
  friend bool operator==(const Position&, const Position&) = default;
};

struct MessageSizes {
  Bytes request = 256;
  Bytes response = 512;
  Bytes header = 32;
  Bytes per_entry = 64;
  friend bool operator==(const MessageSizes&, const MessageSizes&) = default;
};

enum class ArrivalProcess { Deterministic, Poisson };

struct GpsUpdate {
  PlayerId player;
  NodeId device;
  Position position;
  SimTime issued_at = 0;
  Bytes request_bytes = 0;
  Bytes response_bytes = 0;
};

/// Update stream for one player over [0, horizon). Deterministic arrivals
/// start at 0 and repeat every 1/rate seconds; Poisson arrivals draw
/// exponential gaps. Positions take a small random step per update.
std::vector<GpsUpdate> generate_updates(PlayerId player, NodeId device, double rate, SimTime horizon, Rng& rng,
                                        ArrivalProcess process = ArrivalProcess::Deterministic,
                                        const MessageSizes& sizes = {});

struct Response {
  PlayerId player;
  SimTime served_at = 0;
  Bytes bytes = 0;
};

struct ViewEntry {
  Position position;
  SimTime stamp = 0;  // last_update on an edge, as_of in the cloud
  friend bool operator==(const ViewEntry&, const ViewEntry&) = default;
};

/// Player state held by one edge for the players it serves.
struct LocalView {
  NodeId edge;
  std::unordered_set<PlayerId> members;
  std::map<PlayerId, ViewEntry> entries;
  std::set<PlayerId> dirty;
};

/// Cloud-side state for every player.
struct GlobalView {
  std::map<PlayerId, ViewEntry> entries;
  std::map<NodeId, SimTime> last_sync;
  std::uint64_t rejected_deltas = 0;
};

struct DeltaEntry {
  PlayerId player;
  Position position;
  SimTime last_update = 0;
  friend bool operator==(const DeltaEntry&, const DeltaEntry&) = default;
};

struct SyncDelta {
  NodeId edge;
  SimTime built_at = 0;
  std::vector<DeltaEntry> entries;  // ascending player id
  Bytes wire_bytes = 0;
};

/// Records the update in the edge's local view and marks the player dirty.
/// Throws ForeignPlayer when the player is not served by this edge.
Response handle_update_edge(LocalView& view, const GpsUpdate& update, SimTime served_at);

Response handle_update_cloud(GlobalView& view, const GpsUpdate& update, SimTime served_at);

/// Compacts the dirty set into a delta and clears it.
/// wire_bytes = header + per_entry * |entries|.
SyncDelta build_sync_delta(LocalView& view, SimTime built_at, const MessageSizes& sizes = {});

/// Merges a delta; an entry only overwrites an older one. Throws StaleDelta
/// (and counts the rejection) when the delta predates the edge's last sync.
void apply_sync_delta(GlobalView& view, const SyncDelta& delta, SimTime applied_at);

/// `player,lat,lon,as_of_us` rows with a header line.
void write_view_csv(std::ostream& os, const std::map<PlayerId, ViewEntry>& entries);

}  // namespace fogsim
