#include "fogsim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "fogsim/error.hpp"

namespace fogsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    if (pos >= s.size()) break;
    auto end = pos;
    while (end < s.size() && s[end] != ' ' && s[end] != '\t') ++end;
    out.push_back(s.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

template <class T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) return std::nullopt;
  return value;
}

struct Section {
  std::string kind;  // "", node, link, devices, workload, model
  std::vector<std::string> args;
  std::size_t line = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view origin) : origin_(origin) {}

  [[noreturn]] void fail(std::size_t line, std::string_view field, const std::string& msg) const {
    std::ostringstream os;
    os << origin_ << ':' << line;
    if (!field.empty()) os << ": field '" << field << "'";
    os << ": " << msg;
    throw Error(ErrorCode::ParseError, os.str());
  }

  ScenarioConfig parse(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      ++line_no;
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        open_section(line, line_no);
      } else {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, {}, "expected 'key = value' or '[section]'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_no, {}, "empty key");
        if (value.empty()) fail(line_no, key, "empty value");
        assign(key, value, line_no);
      }
    }
    if (!seen_seed_) fail(line_no, "seed", "missing required field 'seed'");
    finish_model();
    return std::move(cfg_);
  }

 private:
  void open_section(std::string_view line, std::size_t line_no) {
    if (line.back() != ']') fail(line_no, {}, "unterminated section header");
    const auto parts = words(line.substr(1, line.size() - 2));
    if (parts.empty()) fail(line_no, {}, "empty section header");
    section_ = Section{std::string(parts[0]), {}, line_no};
    for (std::size_t i = 1; i < parts.size(); ++i) section_.args.emplace_back(parts[i]);
    keys_.clear();

    const auto& kind = section_.kind;
    if (kind == "node") {
      if (section_.args.size() != 1) fail(line_no, {}, "expected [node NAME]");
      cfg_.nodes.push_back(NodeDecl{section_.args[0], NodeKind::TrafficRoutingEdge, 1, 0, std::nullopt, std::nullopt});
    } else if (kind == "link") {
      if (section_.args.size() != 2) fail(line_no, {}, "expected [link NAME NAME]");
      cfg_.links.push_back(LinkDecl{section_.args[0], section_.args[1], 0, std::nullopt, std::nullopt});
    } else if (kind == "devices" || kind == "workload" || kind == "model") {
      if (!section_.args.empty()) fail(line_no, {}, "[" + kind + "] takes no arguments");
      if (!singletons_.insert(kind).second) fail(line_no, {}, "section [" + kind + "] appears twice");
    } else {
      fail(line_no, {}, "unknown section [" + kind + "]");
    }
  }

  SimTime duration(std::string_view key, std::string_view value, std::size_t line) const {
    auto d = parse_duration(value);
    if (!d) fail(line, key, "expected a duration such as 3ms, 1.5s or 250us, got '" + std::string(value) + "'");
    return *d;
  }

  template <class T>
  T number(std::string_view key, std::string_view value, std::size_t line) const {
    auto v = parse_number<T>(value);
    if (!v) fail(line, key, "expected a number, got '" + std::string(value) + "'");
    return *v;
  }

  template <class T>
  std::optional<T> bounded(std::string_view key, std::string_view value, std::size_t line) const {
    if (value == "unbounded") return std::nullopt;
    return number<T>(key, value, line);
  }

  void assign(std::string_view key, std::string_view value, std::size_t line) {
    if (key != "rule" && !keys_.insert(std::string(key)).second) fail(line, key, "duplicate key");
    const auto& kind = section_.kind;
    auto unknown = [&] { fail(line, key, "unknown key in " + (kind.empty() ? std::string("top level") : "[" + kind + "]")); };

    if (kind.empty()) {
      if (key == "name") {
        cfg_.name = std::string(value);
      } else if (key == "seed") {
        cfg_.seed = number<std::uint64_t>(key, value, line);
        seen_seed_ = true;
      } else if (key == "horizon") {
        cfg_.horizon = duration(key, value, line);
      } else if (key == "warmup") {
        cfg_.warmup = duration(key, value, line);
      } else if (key == "sync_interval") {
        cfg_.sync_interval = value == "off" ? 0 : duration(key, value, line);
      } else if (key == "users") {
        cfg_.users = number<std::size_t>(key, value, line);
      } else if (key == "user_counts") {
        cfg_.user_counts.clear();
        for (auto item : split(value, ',')) cfg_.user_counts.push_back(number<std::size_t>(key, item, line));
      } else {
        unknown();
      }
    } else if (kind == "node") {
      auto& n = cfg_.nodes.back();
      if (key == "kind") {
        auto k = parse_node_kind(value);
        if (!k || *k == NodeKind::UserDevice) {
          fail(line, key, "expected routing_edge, capability_edge, peer or cloud, got '" + std::string(value) + "'");
        }
        n.kind = *k;
      } else if (key == "level") {
        n.level = number<std::uint32_t>(key, value, line);
      } else if (key == "service") {
        n.service_time = duration(key, value, line);
      } else if (key == "capacity") {
        n.capacity = bounded<std::uint32_t>(key, value, line);
      } else if (key == "max_queue") {
        n.max_queue = bounded<std::uint32_t>(key, value, line);
      } else {
        unknown();
      }
    } else if (kind == "link") {
      auto& l = cfg_.links.back();
      if (key == "latency") {
        l.latency = duration(key, value, line);
      } else if (key == "reverse_latency") {
        l.reverse_latency = duration(key, value, line);
      } else if (key == "bandwidth") {
        l.bandwidth = bounded<std::uint64_t>(key, value, line);
      } else {
        unknown();
      }
    } else if (kind == "devices") {
      auto& d = cfg_.devices;
      if (key == "attach") {
        for (auto item : split(value, ',')) {
          if (item.empty()) fail(line, key, "empty edge name");
          d.attach.emplace_back(item);
        }
      } else if (key == "latency") {
        d.latency = duration(key, value, line);
      } else if (key == "reverse_latency") {
        d.reverse_latency = duration(key, value, line);
      } else if (key == "bandwidth") {
        d.bandwidth = bounded<std::uint64_t>(key, value, line);
      } else {
        unknown();
      }
    } else if (kind == "workload") {
      auto& w = cfg_.workload;
      if (key == "rate") {
        w.rate = number<double>(key, value, line);
      } else if (key == "arrival") {
        if (value == "poisson") {
          w.arrival = ArrivalProcess::Poisson;
        } else if (value == "deterministic") {
          w.arrival = ArrivalProcess::Deterministic;
        } else {
          fail(line, key, "expected poisson or deterministic");
        }
      } else if (key == "request_bytes") {
        w.sizes.request = number<Bytes>(key, value, line);
      } else if (key == "response_bytes") {
        w.sizes.response = number<Bytes>(key, value, line);
      } else if (key == "header_bytes") {
        w.sizes.header = number<Bytes>(key, value, line);
      } else if (key == "per_entry_bytes") {
        w.sizes.per_entry = number<Bytes>(key, value, line);
      } else if (key == "cloud_fraction") {
        w.cloud_fraction = number<double>(key, value, line);
      } else {
        unknown();
      }
    } else if (kind == "model") {
      if (key == "fog") {
        fog_name_ = std::string(value);
        fog_line_ = line;
      } else if (key == "filter_ratio") {
        aggregate_.filter_ratio = number<double>(key, value, line);
      } else if (key == "batch_window") {
        aggregate_.batch_window = duration(key, value, line);
      } else if (key == "share_policy") {
        if (value == "round_robin") {
          share_.policy = SharePolicy::RoundRobin;
        } else if (value == "capacity_weighted") {
          share_.policy = SharePolicy::CapacityWeighted;
        } else {
          fail(line, key, "expected round_robin or capacity_weighted");
        }
      } else if (key == "rule") {
        rules_.emplace_back(std::string(value), line);
      } else {
        unknown();
      }
    }
  }

  ExecutionModel simple_model(std::string_view name, std::size_t line, std::string_view field) const {
    if (name == "cloud_only") return CloudOnly{};
    if (name == "offload_device_to_edge") return OffloadDeviceToEdge{};
    if (name == "offload_cloud_to_edge") return OffloadCloudToEdge{};
    if (name == "aggregate") return aggregate_;
    if (name == "share") return share_;
    fail(line, field, "unknown execution model '" + std::string(name) + "'");
  }

  HybridRule parse_rule(const std::string& text, std::size_t line) const {
    const auto arrow = text.find("->");
    if (arrow == std::string::npos) fail(line, "rule", "expected '<predicate> -> <model>'");
    const auto lhs = words(trim(std::string_view(text).substr(0, arrow)));
    const auto rhs = trim(std::string_view(text).substr(arrow + 2));
    if (lhs.empty()) fail(line, "rule", "missing predicate");
    Predicate p;
    if (lhs[0] == "always" && lhs.size() == 1) {
      p.test = Predicate::Test::Always;
    } else if ((lhs[0] == "request_bytes_above" || lhs[0] == "request_bytes_at_most") && lhs.size() == 2) {
      p.test = lhs[0] == "request_bytes_above" ? Predicate::Test::RequestBytesAbove
                                               : Predicate::Test::RequestBytesAtMost;
      p.threshold = number<Bytes>("rule", lhs[1], line);
    } else if (lhs[0] == "edge_kind" && lhs.size() == 2) {
      auto k = parse_node_kind(lhs[1]);
      if (!k) fail(line, "rule", "unknown node kind '" + std::string(lhs[1]) + "'");
      p.test = Predicate::Test::EdgeKindIs;
      p.kind = *k;
    } else {
      fail(line, "rule", "unknown predicate '" + std::string(lhs[0]) + "'");
    }
    return HybridRule{p, simple_model(rhs, line, "rule")};
  }

  void finish_model() {
    if (fog_name_.empty()) {
      if (!rules_.empty()) fail(rules_.front().second, "rule", "rules need 'fog = hybrid'");
      return;
    }
    if (fog_name_ == "hybrid") {
      Hybrid h;
      for (const auto& [text, line] : rules_) h.rules.push_back(parse_rule(text, line));
      cfg_.fog_model = std::move(h);
    } else {
      if (!rules_.empty()) fail(rules_.front().second, "rule", "rules need 'fog = hybrid'");
      cfg_.fog_model = simple_model(fog_name_, fog_line_, "fog");
    }
  }

  std::string origin_;
  ScenarioConfig cfg_;
  Section section_;
  std::set<std::string> keys_;
  std::set<std::string> singletons_;
  bool seen_seed_ = false;
  std::string fog_name_;
  std::size_t fog_line_ = 0;
  Aggregate aggregate_;
  Share share_;
  std::vector<std::pair<std::string, std::size_t>> rules_;
};

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::ValidationError, msg); }

}  // namespace

std::optional<SimTime> parse_duration(std::string_view text) {
  text = trim(text);
  std::int64_t scale = 0;
  std::string_view number;
  if (text.ends_with("us")) {
    scale = 1;
    number = text.substr(0, text.size() - 2);
  } else if (text.ends_with("ms")) {
    scale = 1'000;
    number = text.substr(0, text.size() - 2);
  } else if (text.ends_with("s")) {
    scale = 1'000'000;
    number = text.substr(0, text.size() - 1);
  } else {
    return std::nullopt;
  }
  number = trim(number);
  bool negative = false;
  if (!number.empty() && number.front() == '-') {
    negative = true;
    number.remove_prefix(1);
  }
  const auto dot = number.find('.');
  const auto whole_text = number.substr(0, dot);
  auto whole = parse_number<std::int64_t>(whole_text);
  if (!whole) return std::nullopt;
  std::int64_t value = *whole * scale;
  if (dot != std::string_view::npos) {
    const auto frac = number.substr(dot + 1);
    if (frac.empty() || frac.find_first_not_of("0123456789") != std::string_view::npos) return std::nullopt;
    std::int64_t place = scale;
    for (char c : frac) {
      if (place % 10 != 0) {
        if (c != '0') return std::nullopt;  // finer than one microsecond
        continue;
      }
      place /= 10;
      value += (c - '0') * place;
    }
  }
  return negative ? -value : value;
}

TopologySpec ScenarioConfig::topology_for(std::size_t user_count) const {
  TopologySpec spec;
  std::unordered_map<std::string, NodeId> ids;
  for (const auto& decl : nodes) {
    const NodeId id{static_cast<std::uint32_t>(spec.nodes.size())};
    if (!ids.emplace(decl.name, id).second) invalid("node name '" + decl.name + "' declared twice");
    spec.nodes.push_back(Node{id, decl.kind, decl.level, decl.service_time, decl.capacity, decl.max_queue, decl.name});
  }
  auto lookup = [&](const std::string& name, std::string_view where) {
    auto it = ids.find(name);
    if (it == ids.end()) invalid(std::string(where) + " names unknown node '" + name + "'");
    return it->second;
  };
  for (const auto& l : links) {
    spec.links.push_back(LinkSpec{lookup(l.a, "link"), lookup(l.b, "link"), l.latency, l.reverse_latency, l.bandwidth});
  }
  if (devices.attach.empty() && user_count > 0) invalid("[devices] needs 'attach' to place user devices");
  for (std::size_t i = 0; i < user_count; ++i) {
    const NodeId id{static_cast<std::uint32_t>(spec.nodes.size())};
    spec.nodes.push_back(Node{id, NodeKind::UserDevice, 0, 0, std::nullopt, std::nullopt, "device" + std::to_string(i)});
    const NodeId edge = lookup(devices.attach[i % devices.attach.size()], "[devices] attach");
    // Device link latency: device -> edge uses `latency`, edge -> device the reverse.
    spec.links.push_back(LinkSpec{id, edge, devices.latency, devices.reverse_latency, devices.bandwidth});
    spec.device_assignment[id] = edge;
  }
  return spec;
}

void ScenarioConfig::validate(std::size_t user_count) const {
  if (warmup < 0) invalid("warmup must be non-negative");
  if (horizon <= warmup) invalid("horizon must exceed warmup");
  if (sync_interval < 0) invalid("sync_interval must be non-negative");
  if (user_count == 0) invalid("user count must be positive");
  if (user_counts.empty()) invalid("user_counts must not be empty");
  for (auto n : user_counts) {
    if (n == 0) invalid("user_counts entries must be positive");
  }
  if (!(workload.rate > 0) || workload.rate > 1e6) invalid("workload rate must lie in (0, 1e6] per second");
  if (workload.sizes.request == 0 || workload.sizes.response == 0) invalid("message sizes must be positive");
  if (!(workload.cloud_fraction >= 0.0 && workload.cloud_fraction <= 1.0)) {
    invalid("cloud_fraction must lie in [0, 1]");
  }
  for (const auto& n : nodes) {
    if (n.service_time < 0) invalid("node '" + n.name + "' has a negative service time");
    if (n.capacity && *n.capacity == 0) invalid("node '" + n.name + "' has zero capacity");
  }
  for (const auto& l : links) {
    if (l.latency < 0 || (l.reverse_latency && *l.reverse_latency < 0)) {
      invalid("link " + l.a + " - " + l.b + " has a negative latency");
    }
    if (l.bandwidth && *l.bandwidth == 0) invalid("link " + l.a + " - " + l.b + " has zero bandwidth");
  }
  if (devices.latency < 0 || (devices.reverse_latency && *devices.reverse_latency < 0)) {
    invalid("device links have a negative latency");
  }
  try {
    validate_model(fog_model);
    const auto topology = build_topology(topology_for(user_count));
    const auto violations = check_invariants(topology);
    if (!violations.empty()) invalid("topology invariant violated: " + violations.front());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ValidationError) throw;
    invalid(e.what());
  }
}

ScenarioConfig parse_scenario(std::string_view text, std::string_view origin) {
  auto cfg = Parser(origin).parse(text);
  cfg.validate(cfg.users);
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

}  // namespace fogsim

namespace fogsim {

std::string format_duration(SimTime t) {
  if (t != 0 && t % 1'000'000 == 0) return std::to_string(t / 1'000'000) + "s";
  if (t != 0 && t % 1'000 == 0) return std::to_string(t / 1'000) + "ms";
  return std::to_string(t) + "us";
}

namespace {

template <class T>
std::string bound_text(const std::optional<T>& v) {
  return v ? std::to_string(*v) : std::string("unbounded");
}

std::string double_text(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string simple_model_name(const ExecutionModel& m) {
  if (std::holds_alternative<CloudOnly>(m)) return "cloud_only";
  if (std::holds_alternative<OffloadDeviceToEdge>(m)) return "offload_device_to_edge";
  if (std::holds_alternative<OffloadCloudToEdge>(m)) return "offload_cloud_to_edge";
  if (std::holds_alternative<Aggregate>(m)) return "aggregate";
  if (std::holds_alternative<Share>(m)) return "share";
  return "hybrid";
}

}  // namespace

std::string format_scenario(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "name = " << c.name << '\n'
     << "seed = " << c.seed << '\n'
     << "horizon = " << format_duration(c.horizon) << '\n'
     << "warmup = " << format_duration(c.warmup) << '\n'
     << "sync_interval = " << (c.sync_interval == 0 ? std::string("off") : format_duration(c.sync_interval)) << '\n'
     << "users = " << c.users << '\n'
     << "user_counts = ";
  for (std::size_t i = 0; i < c.user_counts.size(); ++i) os << (i ? ", " : "") << c.user_counts[i];
  os << '\n';
  for (const auto& n : c.nodes) {
    os << "\n[node " << n.name << "]\n"
       << "kind = " << to_string(n.kind) << '\n'
       << "level = " << n.level << '\n'
       << "service = " << format_duration(n.service_time) << '\n'
       << "capacity = " << bound_text(n.capacity) << '\n'
       << "max_queue = " << bound_text(n.max_queue) << '\n';
  }
  for (const auto& l : c.links) {
    os << "\n[link " << l.a << ' ' << l.b << "]\n"
       << "latency = " << format_duration(l.latency) << '\n';
    if (l.reverse_latency) os << "reverse_latency = " << format_duration(*l.reverse_latency) << '\n';
    os << "bandwidth = " << bound_text(l.bandwidth) << '\n';
  }
  os << "\n[devices]\n";
  if (!c.devices.attach.empty()) {
    os << "attach = ";
    for (std::size_t i = 0; i < c.devices.attach.size(); ++i) os << (i ? ", " : "") << c.devices.attach[i];
    os << '\n';
  }
  os << "latency = " << format_duration(c.devices.latency) << '\n';
  if (c.devices.reverse_latency) os << "reverse_latency = " << format_duration(*c.devices.reverse_latency) << '\n';
  os << "bandwidth = " << bound_text(c.devices.bandwidth) << '\n';

  const auto& w = c.workload;
  os << "\n[workload]\n"
     << "rate = " << double_text(w.rate) << '\n'
     << "arrival = " << (w.arrival == ArrivalProcess::Poisson ? "poisson" : "deterministic") << '\n'
     << "request_bytes = " << w.sizes.request << '\n'
     << "response_bytes = " << w.sizes.response << '\n'
     << "header_bytes = " << w.sizes.header << '\n'
     << "per_entry_bytes = " << w.sizes.per_entry << '\n'
     << "cloud_fraction = " << double_text(w.cloud_fraction) << '\n';

  os << "\n[model]\n"
     << "fog = " << simple_model_name(c.fog_model) << '\n';
  // Aggregate and share parameters are shared by the top-level model and any
  // hybrid rule that names them.
  std::optional<Aggregate> agg;
  std::optional<Share> share;
  auto note = [&](const ExecutionModel& m) {
    if (const auto* a = std::get_if<Aggregate>(&m)) agg = *a;
    if (const auto* s = std::get_if<Share>(&m)) share = *s;
  };
  note(c.fog_model);
  if (const auto* h = std::get_if<Hybrid>(&c.fog_model)) {
    for (const auto& r : h->rules) note(r.model);
  }
  if (agg) {
    os << "filter_ratio = " << double_text(agg->filter_ratio) << '\n'
       << "batch_window = " << format_duration(agg->batch_window) << '\n';
  }
  if (share) {
    os << "share_policy = " << (share->policy == SharePolicy::RoundRobin ? "round_robin" : "capacity_weighted") << '\n';
  }
  if (const auto* h = std::get_if<Hybrid>(&c.fog_model)) {
    for (const auto& r : h->rules) {
      os << "rule = ";
      switch (r.when.test) {
        case Predicate::Test::Always: os << "always"; break;
        case Predicate::Test::RequestBytesAbove: os << "request_bytes_above " << r.when.threshold; break;
        case Predicate::Test::RequestBytesAtMost: os << "request_bytes_at_most " << r.when.threshold; break;
        case Predicate::Test::EdgeKindIs: os << "edge_kind " << to_string(r.when.kind); break;
      }
      os << " -> " << simple_model_name(r.model) << '\n';
    }
  }
  return os.str();
}

}  // namespace fogsim
