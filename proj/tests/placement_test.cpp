#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "fogsim/error.hpp"
#include "fogsim/placement.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace fogsim;
using fogsim::test::chain_spec;
using fogsim::test::make_node;
using fogsim::test::oracle_kept;
using fogsim::test::oracle_schedule;
using fogsim::test::oracle_weighted_loads;

namespace {

GpsUpdate request_from(NodeId device, Bytes request_bytes = 256, std::uint32_t player = 0) {
  return GpsUpdate{PlayerId{player}, device, {}, 0, request_bytes, 512};
}

}  // namespace

TEST_CASE("placement of the basic models") {
  const auto t = build_topology(chain_spec());
  const NodeId device{0}, edge{1}, cloud{2};
  CHECK(place_request(CloudOnly{}, request_from(device), t) == cloud);
  CHECK(place_request(OffloadCloudToEdge{}, request_from(device), t) == edge);
  CHECK(place_request(OffloadDeviceToEdge{}, request_from(device), t) == edge);
  CHECK(place_request(Aggregate{0.5, seconds(1)}, request_from(device), t) == edge);
  CHECK_THROWS_AS(place_request(CloudOnly{}, request_from(NodeId{42}), t), Error);
}

TEST_CASE("hybrid rules: first match wins") {
  const auto t = build_topology(chain_spec());
  const NodeId device{0}, edge{1}, cloud{2};
  Hybrid h;
  h.rules.push_back(HybridRule{Predicate{Predicate::Test::RequestBytesAbove, 1024, {}}, CloudOnly{}});
  h.rules.push_back(HybridRule{Predicate{}, OffloadCloudToEdge{}});
  const ExecutionModel model = h;
  REQUIRE_NOTHROW(validate_model(model));

  // Oracle: walk the rules by hand.
  auto oracle = [&](Bytes size) {
    for (const auto& r : h.rules) {
      const bool hit = r.when.test == Predicate::Test::Always ||
                       (r.when.test == Predicate::Test::RequestBytesAbove && size > r.when.threshold);
      if (hit) return std::holds_alternative<CloudOnly>(r.model) ? cloud : edge;
    }
    return NodeId{999};
  };
  for (Bytes size : {1, 256, 1024, 1025, 2048, 1 << 20}) {
    CHECK(place_request(model, request_from(device, size), t) == oracle(size));
  }
  CHECK(place_request(model, request_from(device, 2048), t) == cloud);

  Hybrid kinded;
  kinded.rules.push_back(
      HybridRule{Predicate{Predicate::Test::EdgeKindIs, 0, NodeKind::TrafficRoutingEdge}, OffloadCloudToEdge{}});
  kinded.rules.push_back(HybridRule{Predicate{}, CloudOnly{}});
  CHECK(place_request(ExecutionModel{kinded}, request_from(device), t) == edge);
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(validate_model(Hybrid{}), Error);
  Hybrid no_catch_all;
  no_catch_all.rules.push_back(HybridRule{Predicate{Predicate::Test::RequestBytesAbove, 1, {}}, CloudOnly{}});
  try {
    validate_model(no_catch_all);
    FAIL("hybrid without catch-all accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidModel);
  }
  CHECK_THROWS_AS(validate_model(Aggregate{1.5, seconds(1)}), Error);
  CHECK_THROWS_AS(validate_model(Aggregate{0.5, 0}), Error);
  CHECK_NOTHROW(validate_model(Aggregate{1.0, 1}));
}

TEST_CASE("placement is a pure function") {
  const auto t = build_topology(chain_spec());
  const ExecutionModel m = Share{SharePolicy::CapacityWeighted};
  const auto req = request_from(NodeId{0}, 300, 5);
  const auto first = place_request(m, req, t);
  for (int i = 0; i < 10; ++i) CHECK(place_request(m, req, t) == first);
}

TEST_CASE("share placement spreads players over the edge and its peers") {
  auto spec = chain_spec();
  spec.nodes.push_back(make_node(3, NodeKind::PeerNode, 1, 30'000, 3));
  spec.links.push_back(LinkSpec{NodeId{3}, NodeId{2}, 12'000, {}, {}});
  spec.links.push_back(LinkSpec{NodeId{1}, NodeId{3}, 500, {}, {}});
  spec.nodes[1].capacity = 1;
  const auto t = build_topology(spec);
  std::map<NodeId, int> rr, weighted;
  for (std::uint32_t p = 0; p < 8; ++p) {
    ++rr[place_request(Share{SharePolicy::RoundRobin}, request_from(NodeId{0}, 256, p), t)];
    ++weighted[place_request(Share{SharePolicy::CapacityWeighted}, request_from(NodeId{0}, 256, p), t)];
  }
  CHECK(rr[NodeId{1}] == 4);
  CHECK(rr[NodeId{3}] == 4);
  CHECK(weighted[NodeId{1}] == 2);  // capacities 1 : 3
  CHECK(weighted[NodeId{3}] == 6);
}

TEST_CASE("aggregate_batch examples") {
  std::vector<SensorReading> thousand{{NodeId{1}, 400, 0}, {NodeId{2}, 600, 0}};
  CHECK(aggregate_batch(thousand, 0.0).bytes == 32 + 1000);
  CHECK(aggregate_batch(thousand, 1.0).bytes == 32);
  std::vector<SensorReading> hundred(100, SensorReading{NodeId{1}, 100, 0});
  const auto msg = aggregate_batch(hundred, 0.9);
  CHECK(msg.bytes == 32 + 1000);
  CHECK(msg.readings == 100);
  CHECK(msg.payload_bytes == 10'000);
  // 0.7 of 1000 in binary floating point is 300.00000000000006; exact ppm keeps 300.
  std::vector<SensorReading> k{{NodeId{1}, 1000, 0}};
  CHECK(aggregate_batch(k, 0.7).bytes == 32 + 300);

  try {
    aggregate_batch({}, 0.5);
    FAIL("empty batch accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyBatch);
  }
}

TEST_CASE("property: aggregation conservation over batch sequences") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 300; ++trial) {
    const double ratio = static_cast<double>(gen() % 1001) / 1000.0;
    const std::uint64_t ratio_ppm = static_cast<std::uint64_t>(std::llround(ratio * 1e6));
    BatchBuffer buffer;
    Bytes forwarded = 0, oracle = 0;
    const int batches = 1 + static_cast<int>(gen() % 8);
    for (int b = 0; b < batches; ++b) {
      Bytes batch_payload = 0;
      const int n = 1 + static_cast<int>(gen() % 40);
      for (int i = 0; i < n; ++i) {
        const Bytes size = 1 + gen() % 2000;
        buffer.add(SensorReading{NodeId{static_cast<std::uint32_t>(i)}, size, b});
        batch_payload += size;
      }
      forwarded += buffer.close(ratio, 32).bytes;
      CHECK(buffer.empty());
      oracle += 32 + oracle_kept(1'000'000 - ratio_ppm, batch_payload);
    }
    CHECK(forwarded == oracle);
  }
}

TEST_CASE("share_assign examples") {
  const std::vector<std::pair<NodeId, std::uint64_t>> three{{NodeId{1}, 1}, {NodeId{2}, 1}, {NodeId{3}, 1}};
  CHECK(share_assign(6, three, SharePolicy::RoundRobin).loads == std::vector<std::size_t>{2, 2, 2});
  const auto seven = share_assign(7, three, SharePolicy::RoundRobin);
  CHECK(seven.loads == std::vector<std::size_t>{3, 2, 2});
  CHECK(seven.task_to_peer.size() == 7);

  const std::vector<std::pair<NodeId, std::uint64_t>> weighted{{NodeId{1}, 3}, {NodeId{2}, 1}};
  const auto ten = share_assign(10, weighted, SharePolicy::CapacityWeighted);
  CHECK(ten.loads == std::vector<std::size_t>{8, 2});
  CHECK(ten.loads == oracle_weighted_loads(10, {3, 1}));
  CHECK(std::count(ten.task_to_peer.begin(), ten.task_to_peer.end(), NodeId{1}) == 8);

  try {
    share_assign(3, {}, SharePolicy::RoundRobin);
    FAIL("no peers accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoPeers);
  }
  const std::vector<std::pair<NodeId, std::uint64_t>> zero{{NodeId{1}, 0}};
  CHECK_THROWS_AS(share_assign(3, zero, SharePolicy::CapacityWeighted), Error);
}

TEST_CASE("property: share completeness, balance and largest remainder") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 2'000; ++trial) {
    const std::size_t tasks = gen() % 200;
    const std::size_t n = 1 + gen() % 8;
    std::vector<std::pair<NodeId, std::uint64_t>> peers;
    std::vector<std::uint64_t> weights;
    for (std::size_t i = 0; i < n; ++i) {
      weights.push_back(1 + gen() % 10);
      peers.emplace_back(NodeId{static_cast<std::uint32_t>(i)}, weights.back());
    }
    const auto rr = share_assign(tasks, peers, SharePolicy::RoundRobin);
    std::size_t sum = 0;
    for (auto l : rr.loads) sum += l;
    CHECK(sum == tasks);
    CHECK(rr.task_to_peer.size() == tasks);
    const auto [mn, mx] = std::minmax_element(rr.loads.begin(), rr.loads.end());
    CHECK(*mx - *mn <= 1);

    const auto cw = share_assign(tasks, peers, SharePolicy::CapacityWeighted);
    CHECK(cw.task_to_peer.size() == tasks);
    CHECK(cw.loads == oracle_weighted_loads(tasks, weights));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::count(cw.task_to_peer.begin(), cw.task_to_peer.end(), peers[i].first) ==
            static_cast<std::ptrdiff_t>(cw.loads[i]));
    }
  }
}

TEST_CASE("queue_and_serve examples") {
  SUBCASE("idle node") {
    ServerQueue q(milliseconds(10), 1);
    CHECK(q.queue_and_serve(0) == milliseconds(10));
  }
  SUBCASE("FIFO behind one slot") {
    ServerQueue q(milliseconds(10), 1);
    CHECK(q.queue_and_serve(0) == milliseconds(10));
    CHECK(q.queue_and_serve(0) == milliseconds(20));
  }
  SUBCASE("two slots, three arrivals") {
    ServerQueue q(milliseconds(10), 2);
    CHECK(q.queue_and_serve(0) == milliseconds(10));
    CHECK(q.queue_and_serve(0) == milliseconds(10));
    CHECK(q.queue_and_serve(0) == milliseconds(20));
  }
  SUBCASE("unbounded capacity never waits") {
    ServerQueue q(milliseconds(10), std::nullopt);
    for (int i = 0; i < 100; ++i) CHECK(q.queue_and_serve(5) == 5 + milliseconds(10));
  }
  SUBCASE("bounded waiting line overflows") {
    ServerQueue q(milliseconds(10), 1, 1);
    CHECK(q.queue_and_serve(0) == milliseconds(10));
    CHECK(q.queue_and_serve(0) == milliseconds(20));
    try {
      q.queue_and_serve(0);
      FAIL("overflow accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::QueueOverflow);
    }
    CHECK(q.dropped() == 1);
    CHECK(q.queue_and_serve(milliseconds(10)) == milliseconds(30));
  }
  SUBCASE("arrivals must be in time order") {
    ServerQueue q(1, 1);
    q.queue_and_serve(10);
    CHECK_THROWS_AS(q.queue_and_serve(9), Error);
  }
}

TEST_CASE("property: queue matches a brute-force slot schedule") {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 3'000; ++trial) {
    const std::size_t n = 1 + gen() % 10;
    std::vector<SimTime> arrivals;
    for (std::size_t i = 0; i < n; ++i) arrivals.push_back(static_cast<SimTime>(gen() % 60));
    std::sort(arrivals.begin(), arrivals.end());
    const SimTime service = static_cast<SimTime>(1 + gen() % 20);
    const auto capacity = static_cast<std::uint32_t>(1 + gen() % 3);
    std::optional<std::uint32_t> max_queue;
    if (gen() % 2) max_queue = static_cast<std::uint32_t>(gen() % 3);

    ServerQueue q(service, capacity, max_queue);
    const auto oracle = oracle_schedule(arrivals, service, capacity, max_queue);
    for (std::size_t i = 0; i < n; ++i) {
      const auto got = q.admit(arrivals[i]);
      CHECK(got == oracle[i]);
      if (got) CHECK(*got >= arrivals[i] + service);
    }
  }
}
