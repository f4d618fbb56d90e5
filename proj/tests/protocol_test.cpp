#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "fogsim/protocol.hpp"

using namespace fogsim;

namespace {

GpsUpdate update(std::uint32_t player, std::int64_t lat, std::int64_t lon, SimTime t = 0) {
  return GpsUpdate{PlayerId{player}, NodeId{100 + player}, Position{lat, lon}, t, 256, 512};
}

LocalView view_for(std::uint32_t edge, std::initializer_list<std::uint32_t> players) {
  LocalView v;
  v.edge = NodeId{edge};
  for (auto p : players) v.members.insert(PlayerId{p});
  return v;
}

}  // namespace

TEST_CASE("deterministic updates tick at fixed intervals") {
  Rng rng(1);
  const auto ups = generate_updates(PlayerId{0}, NodeId{5}, 1.0, seconds(3), rng);
  REQUIRE(ups.size() == 3);
  CHECK(ups[0].issued_at == 0);
  CHECK(ups[1].issued_at == seconds(1));
  CHECK(ups[2].issued_at == seconds(2));
  for (const auto& u : ups) {
    CHECK(u.request_bytes == 256);
    CHECK(u.response_bytes == 512);
    CHECK(u.device == NodeId{5});
  }
}

TEST_CASE("zero horizon yields no updates") {
  Rng rng(1);
  CHECK(generate_updates(PlayerId{0}, NodeId{5}, 5.0, 0, rng, ArrivalProcess::Poisson).empty());
  CHECK_THROWS_AS(generate_updates(PlayerId{0}, NodeId{5}, 0.0, seconds(1), rng), Error);
}

TEST_CASE("poisson counts match the rate across seeds") {
  // 5/s over 300 s: mean 1500, sigma sqrt(1500).
  const double mean = 1500.0;
  const double sigma = std::sqrt(mean);
  double total = 0;
  int outside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto ups = generate_updates(PlayerId{0}, NodeId{1}, 5.0, seconds(300), rng, ArrivalProcess::Poisson);
    for (std::size_t i = 1; i < ups.size(); ++i) REQUIRE(ups[i].issued_at > ups[i - 1].issued_at);
    REQUIRE(ups.back().issued_at < seconds(300));
    const auto n = static_cast<double>(ups.size());
    total += n;
    if (std::abs(n - mean) > 3 * sigma) ++outside;
  }
  // Expected 0.27 of 100 beyond 3 sigma; the mean over 100 seeds has sigma/10.
  CHECK(outside <= 2);
  CHECK(std::abs(total / 100.0 - mean) <= 3 * sigma / 10.0);
}

TEST_CASE("positions random-walk and reproduce per seed") {
  Rng a(3), b(3);
  const auto x = generate_updates(PlayerId{1}, NodeId{1}, 5.0, seconds(10), a, ArrivalProcess::Poisson);
  const auto y = generate_updates(PlayerId{1}, NodeId{1}, 5.0, seconds(10), b, ArrivalProcess::Poisson);
  REQUIRE(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(x[i].position == y[i].position);
    CHECK(x[i].issued_at == y[i].issued_at);
  }
  bool moved = false;
  for (std::size_t i = 1; i < x.size(); ++i) moved |= !(x[i].position == x[0].position);
  CHECK(moved);
}

TEST_CASE("edge serving: insertion, last writer wins, foreign players") {
  auto view = view_for(1, {7, 8});
  const auto r = handle_update_edge(view, update(7, 10, 20), 1'000);
  CHECK(r.bytes == 512);
  CHECK(r.served_at == 1'000);
  CHECK(view.entries.size() == 1);
  CHECK(view.dirty == std::set<PlayerId>{PlayerId{7}});

  handle_update_edge(view, update(7, 11, 21), 2'000);
  CHECK(view.dirty == std::set<PlayerId>{PlayerId{7}});
  CHECK(view.entries.at(PlayerId{7}) == ViewEntry{Position{11, 21}, 2'000});

  try {
    handle_update_edge(view, update(9, 0, 0), 3'000);
    FAIL("foreign player accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ForeignPlayer);
  }
  CHECK(view.entries.size() == 1);
}

TEST_CASE("cloud serving") {
  GlobalView g;
  handle_update_cloud(g, update(1, 5, 6), 40'000);
  CHECK(g.entries.at(PlayerId{1}) == ViewEntry{Position{5, 6}, 40'000});

  GlobalView many;
  for (std::uint32_t p = 0; p < 25; ++p) handle_update_cloud(many, update(p, p, p), p);
  CHECK(many.entries.size() == 25);
}

TEST_CASE("interleaved cloud updates keep each player's latest") {
  std::mt19937_64 gen(8);
  GlobalView g;
  std::map<PlayerId, Position> oracle;
  for (SimTime t = 0; t < 300; ++t) {
    const auto p = static_cast<std::uint32_t>(gen() % 3);
    const auto u = update(p, static_cast<std::int64_t>(gen() % 1000), static_cast<std::int64_t>(gen() % 1000), t);
    handle_update_cloud(g, u, t);
    oracle[u.player] = u.position;
  }
  REQUIRE(g.entries.size() == oracle.size());
  for (const auto& [p, pos] : oracle) CHECK(g.entries.at(p).position == pos);
}

TEST_CASE("sync delta sizes and compaction") {
  const MessageSizes sizes;
  SUBCASE("empty") {
    auto view = view_for(1, {1});
    const auto d = build_sync_delta(view, 5, sizes);
    CHECK(d.entries.empty());
    CHECK(d.wire_bytes == 32);
  }
  SUBCASE("two players") {
    auto view = view_for(1, {1, 2});
    handle_update_edge(view, update(1, 1, 1), 1);
    handle_update_edge(view, update(2, 2, 2), 2);
    const auto d = build_sync_delta(view, 5, sizes);
    CHECK(d.entries.size() == 2);
    CHECK(d.wire_bytes == 32 + 2 * 64);
    CHECK(view.dirty.empty());
    CHECK(view.entries.size() == 2);
  }
  SUBCASE("100 updates to 10 players") {
    LocalView view;
    view.edge = NodeId{1};
    for (std::uint32_t p = 0; p < 10; ++p) view.members.insert(PlayerId{p});
    std::mt19937_64 gen(2);
    std::map<PlayerId, DeltaEntry> oracle;
    for (SimTime t = 1; t <= 100; ++t) {
      const auto p = static_cast<std::uint32_t>(t % 10);
      const auto u = update(p, static_cast<std::int64_t>(gen() % 500), static_cast<std::int64_t>(gen() % 500), t);
      handle_update_edge(view, u, t);
      oracle[u.player] = DeltaEntry{u.player, u.position, t};
    }
    const auto d = build_sync_delta(view, 200, sizes);
    REQUIRE(d.entries.size() == 10);
    for (const auto& e : d.entries) CHECK(e == oracle.at(e.player));
    CHECK(build_sync_delta(view, 300, sizes).entries.empty());
  }
}

TEST_CASE("applying deltas") {
  SUBCASE("into an empty view") {
    GlobalView g;
    SyncDelta d{NodeId{1}, 100, {DeltaEntry{PlayerId{4}, Position{1, 2}, 90}}, 96};
    apply_sync_delta(g, d, 120);
    CHECK(g.entries.at(PlayerId{4}) == ViewEntry{Position{1, 2}, 90});
    CHECK(g.last_sync.at(NodeId{1}) == 100);
  }
  SUBCASE("older entries never overwrite") {
    GlobalView g;
    handle_update_cloud(g, update(4, 9, 9), 500);
    SyncDelta d{NodeId{1}, 600, {DeltaEntry{PlayerId{4}, Position{1, 2}, 400}}, 96};
    apply_sync_delta(g, d, 610);
    CHECK(g.entries.at(PlayerId{4}) == ViewEntry{Position{9, 9}, 500});
  }
  SUBCASE("two edges with disjoint players union") {
    auto e1 = view_for(1, {0, 1, 2});
    auto e2 = view_for(2, {3, 4});
    std::map<PlayerId, Position> oracle;
    for (std::uint32_t p = 0; p < 5; ++p) {
      auto& v = p < 3 ? e1 : e2;
      const auto u = update(p, 100 + p, 200 + p, p);
      handle_update_edge(v, u, p + 10);
      oracle[u.player] = u.position;
    }
    GlobalView g;
    apply_sync_delta(g, build_sync_delta(e1, 50), 60);
    apply_sync_delta(g, build_sync_delta(e2, 50), 61);
    REQUIRE(g.entries.size() == oracle.size());
    for (const auto& [p, pos] : oracle) CHECK(g.entries.at(p).position == pos);
  }
  SUBCASE("out-of-order deltas are rejected and counted") {
    GlobalView g;
    apply_sync_delta(g, SyncDelta{NodeId{1}, 2'000, {}, 32}, 2'100);
    try {
      apply_sync_delta(g, SyncDelta{NodeId{1}, 1'000, {DeltaEntry{PlayerId{1}, {}, 900}}, 96}, 2'200);
      FAIL("stale delta applied");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::StaleDelta);
    }
    CHECK(g.rejected_deltas == 1);
    CHECK(g.entries.empty());
    CHECK(g.last_sync.at(NodeId{1}) == 2'000);
  }
}

TEST_CASE("view csv dump") {
  GlobalView g;
  handle_update_cloud(g, update(2, 54597300, -5930100), 1'234);
  std::ostringstream os;
  write_view_csv(os, g.entries);
  CHECK(os.str() == "player,lat,lon,as_of_us\n2,54597300,-5930100,1234\n");
}
