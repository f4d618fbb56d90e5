#pragma once

// Brute-force reference implementations shared by the unit and acceptance tests.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "fogsim/time.hpp"

namespace fogsim::test {

// Smallest k with k * 1e6 >= keep_ppm * payload, found by search rather than
// the closed form the implementation uses.
inline Bytes oracle_kept(std::uint64_t keep_ppm, Bytes payload) {
  const auto target = keep_ppm * payload;
  Bytes lo = 0, hi = payload;
  while (lo < hi) {
    const auto mid = (lo + hi) / 2;
    if (mid * 1'000'000 >= target) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

// Enumerates every floor/ceil rounding of the weighted shares that sums to
// `tasks`, keeps those with the smallest total deviation, breaking ties by
// the lexicographically earliest set of rounded-up peers.
inline std::vector<std::size_t> oracle_weighted_loads(std::size_t tasks, const std::vector<std::uint64_t>& w) {
  const std::size_t n = w.size();
  std::uint64_t total = 0;
  for (auto x : w) total += x;
  std::vector<std::size_t> floors(n);
  std::size_t base = 0;
  for (std::size_t i = 0; i < n; ++i) {
    floors[i] = tasks * w[i] / total;
    base += floors[i];
  }
  const std::size_t extra = tasks - base;
  std::vector<std::size_t> best;
  // Deviation scaled by `total`: |load*total - tasks*w|.
  std::uint64_t best_dev = UINT64_MAX;
  std::vector<std::size_t> best_ups;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != extra) continue;
    std::vector<std::size_t> loads = floors;
    std::vector<std::size_t> ups;
    std::uint64_t dev = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) {
        ++loads[i];
        ups.push_back(i);
      }
      const auto exact = tasks * w[i];
      const auto have = loads[i] * total;
      dev += have > exact ? have - exact : exact - have;
    }
    if (dev < best_dev || (dev == best_dev && ups < best_ups)) {
      best_dev = dev;
      best = loads;
      best_ups = ups;
    }
  }
  return best;
}

// Tick-by-tick slot simulation: at each microsecond, waiting jobs first take
// any slot freed by then (FIFO), then arrivals join; an arrival that finds no
// free slot and a full waiting line is dropped.
inline std::vector<std::optional<SimTime>> oracle_schedule(const std::vector<SimTime>& arrivals, SimTime service,
                                                    std::uint32_t capacity, std::optional<std::uint32_t> max_queue) {
  std::vector<std::optional<SimTime>> done(arrivals.size());
  std::vector<SimTime> busy_until(capacity, -1);
  std::vector<std::size_t> waiting;
  std::size_t next = 0;
  auto start_waiting = [&](SimTime t) {
    for (auto& b : busy_until) {
      if (waiting.empty()) break;
      if (b <= t) {
        b = t + service;
        done[waiting.front()] = t + service;
        waiting.erase(waiting.begin());
      }
    }
  };
  for (SimTime t = 0; t < 10'000; ++t) {
    start_waiting(t);
    while (next < arrivals.size() && arrivals[next] == t) {
      const bool free_now = std::any_of(busy_until.begin(), busy_until.end(), [&](SimTime b) { return b <= t; });
      if (!free_now && max_queue && waiting.size() >= *max_queue) {
        ++next;
        continue;
      }
      waiting.push_back(next++);
      start_waiting(t);
    }
  }
  return done;
}

}  // namespace fogsim::test
