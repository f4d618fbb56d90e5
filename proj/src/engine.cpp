#include "fogsim/engine.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace fogsim {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::MessageArrival: return "MessageArrival";
    case EventKind::ServiceComplete: return "ServiceComplete";
    case EventKind::SyncTimer: return "SyncTimer";
    case EventKind::RequestIssue: return "RequestIssue";
    case EventKind::MeasurementEnd: return "MeasurementEnd";
  }
  return "Unknown";
}

std::string_view to_string(MessageType type) {
  switch (type) {
    case MessageType::None: return "none";
    case MessageType::Request: return "request";
    case MessageType::Response: return "response";
    case MessageType::SyncDelta: return "sync";
    case MessageType::Aggregate: return "aggregate";
  }
  return "unknown";
}

void write_trace_csv(std::ostream& os, const EventTrace& trace) {
  os << "time_us,seq,kind,node,detail\n";
  for (const auto& e : trace) {
    os << e.time << ',' << e.seq << ',' << to_string(e.kind) << ',' << e.node.value << ',';
    switch (e.kind) {
      case EventKind::MessageArrival:
        os << to_string(e.message) << " #" << e.ref << " from " << e.from.value << ' ' << e.bytes << 'B';
        break;
      case EventKind::ServiceComplete:
      case EventKind::RequestIssue:
        os << to_string(e.message) << " #" << e.ref;
        break;
      case EventKind::SyncTimer:
        os << (e.message == MessageType::Aggregate ? "batch" : "sync");
        break;
      case EventKind::MeasurementEnd:
        break;
    }
    os << '\n';
  }
}

std::uint64_t Engine::schedule(Event event) {
  if (event.time < now_) {
    throw Error(ErrorCode::TimeTravel,
                "event at " + std::to_string(event.time) + " us scheduled at clock " + std::to_string(now_));
  }
  event.seq = next_seq_++;
  queue_.push(event);
  return event.seq;
}

const EventTrace& Engine::run_until(SimTime t_end) {
  if (t_end < now_) {
    throw Error(ErrorCode::TimeTravel, "run_until(" + std::to_string(t_end) + ") behind clock " + std::to_string(now_));
  }
  stop_requested_ = false;
  while (!queue_.empty() && queue_.top().time <= t_end) {
    const Event event = queue_.top();
    queue_.pop();
    now_ = event.time;
    ++processed_;
    if (record_trace_) trace_.push_back(event);
    if (handler_) {
      try {
        handler_(*this, event);
      } catch (const std::exception& ex) {
        throw HandlerFault(std::string(to_string(event.kind)) + " at " + std::to_string(event.time) +
                               " us: " + ex.what(),
                           trace_);
      }
    }
    if (stop_requested_) return trace_;
  }
  now_ = t_end;
  return trace_;
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw Error(ErrorCode::InvalidArgument, "uniform_int with empty range");
  const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(gen_());  // full 64-bit range
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % span);
  std::uint64_t x = gen_();
  while (x >= limit) x = gen_();
  return lo + static_cast<std::int64_t>(x % span);
}

double Rng::exponential(double rate) {
  if (!(rate > 0)) throw Error(ErrorCode::InvalidArgument, "exponential rate must be positive");
  return -std::log1p(-uniform01()) / rate;
}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace fogsim
