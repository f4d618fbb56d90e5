#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <queue>
#include <random>
#include <string_view>
#include <vector>

#include "fogsim/error.hpp"
#include "fogsim/ids.hpp"
#include "fogsim/time.hpp"

namespace fogsim {

enum class EventKind : std::uint8_t {
  MessageArrival,
  ServiceComplete,
  SyncTimer,
  RequestIssue,
  MeasurementEnd,
};

enum class MessageType : std::uint8_t {
  None,
  Request,
  Response,
  SyncDelta,
  Aggregate,
};

std::string_view to_string(EventKind kind);
std::string_view to_string(MessageType type);

struct Event {
  SimTime time = 0;
  std::uint64_t seq = 0;  // assigned by the engine
  EventKind kind = EventKind::MeasurementEnd;
  NodeId node;              // where the event happens
  NodeId from;              // previous hop for MessageArrival
  MessageType message = MessageType::None;
  std::uint64_t ref = 0;    // request id or message id
  Bytes bytes = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

using EventTrace = std::vector<Event>;

/// `time_us,seq,kind,node,detail` rows with a header line.
void write_trace_csv(std::ostream& os, const EventTrace& trace);

/// Thrown by run_until when a handler fails; carries the trace up to and
/// including the faulting event.
class HandlerFault : public Error {
 public:
  HandlerFault(const std::string& what, EventTrace partial)
      : Error(ErrorCode::HandlerFault, what), partial_(std::move(partial)) {}
  const EventTrace& partial_trace() const { return partial_; }

 private:
  EventTrace partial_;
};

class Engine {
 public:
  using Handler = std::function<void(Engine&, const Event&)>;

  explicit Engine(Handler handler = {}, bool record_trace = true)
      : handler_(std::move(handler)), record_trace_(record_trace) {}

  void set_handler(Handler handler) { handler_ = std::move(handler); }

  /// Enqueues the event and returns its sequence number. Throws TimeTravel
  /// when event.time < now().
  std::uint64_t schedule(Event event);

  /// Processes every queued event with time <= t_end in (time, seq) order.
  /// The clock ends at t_end unless a handler called stop(), in which case it
  /// stays at the time of the last processed event.
  const EventTrace& run_until(SimTime t_end);

  /// Ends the current run_until after the event being handled.
  void stop() { stop_requested_ = true; }

  SimTime now() const { return now_; }
  std::size_t pending() const { return queue_.size(); }
  std::uint64_t processed() const { return processed_; }
  const EventTrace& trace() const { return trace_; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  Handler handler_;
  bool record_trace_;
  bool stop_requested_ = false;
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t processed_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  EventTrace trace_;
};

/// Seeded generator: 64-bit Mersenne Twister (std::mt19937_64, whose output
/// sequence is fixed by the standard). Derived values use only the raw
/// 64-bit outputs, never std:: distributions, so a seed reproduces the same
/// draws on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return gen_(); }
  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [lo, hi], rejection sampled.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Exponential variate with the given rate (events per unit).
  double exponential(double rate);

  /// Independent stream for a sub-component, derived with splitmix64.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace fogsim
