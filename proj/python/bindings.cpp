#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "fogsim/error.hpp"
#include "fogsim/experiment.hpp"
#include "fogsim/simulation.hpp"

namespace py = pybind11;
using namespace fogsim;

namespace {

NodeId node(std::uint32_t id) { return NodeId{id}; }

py::list path_to_list(const Path& path) {
  py::list out;
  for (const auto& l : path) out.append(py::make_tuple(l.src.value, l.dst.value, l.one_way_latency));
  return out;
}

py::dict traffic_to_dict(const LinkTraffic& traffic) {
  py::dict out;
  for (const auto& [key, bytes] : traffic) out[py::make_tuple(key.first.value, key.second.value)] = bytes;
  return out;
}

py::dict view_to_dict(const std::map<PlayerId, ViewEntry>& entries) {
  py::dict out;
  for (const auto& [player, e] : entries) {
    out[py::int_(player.value)] = py::make_tuple(e.position.lat, e.position.lon, e.stamp);
  }
  return out;
}

py::list trace_to_list(const EventTrace& trace) {
  py::list out;
  for (const auto& e : trace) {
    out.append(py::make_tuple(e.time, e.seq, std::string(to_string(e.kind)), e.node.value, e.from.value,
                              std::string(to_string(e.message)), e.ref, e.bytes));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_fogsim, m) {
  m.doc() = "Discrete-event simulator comparing cloud-only and fog deployments of a location-aware game.";

  // FogsimError(RuntimeError) with a `code` attribute naming the ErrorCode.
  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result([&] { return py::object(py::exception<Error>(m, "FogsimError", PyExc_RuntimeError)); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object& cls = error_type.get_stored();
      py::object instance = cls(e.what());
      instance.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(cls.ptr(), instance.ptr());
    }
  });

  py::enum_<NodeKind>(m, "NodeKind")
      .value("UserDevice", NodeKind::UserDevice)
      .value("TrafficRoutingEdge", NodeKind::TrafficRoutingEdge)
      .value("CapabilityAddedEdge", NodeKind::CapabilityAddedEdge)
      .value("PeerNode", NodeKind::PeerNode)
      .value("CloudServer", NodeKind::CloudServer);

  py::enum_<SharePolicy>(m, "SharePolicy")
      .value("RoundRobin", SharePolicy::RoundRobin)
      .value("CapacityWeighted", SharePolicy::CapacityWeighted);

  py::enum_<RunMode>(m, "RunMode").value("CloudOnly", RunMode::CloudOnly).value("Fog", RunMode::Fog);

  // Topology --------------------------------------------------------------------
  py::class_<Node>(m, "Node")
      .def_property_readonly("id", [](const Node& n) { return n.id.value; })
      .def_readonly("kind", &Node::kind)
      .def_readonly("level", &Node::level)
      .def_readonly("service_time", &Node::service_time)
      .def_readonly("capacity", &Node::capacity)
      .def_readonly("max_queue", &Node::max_queue)
      .def_readonly("name", &Node::name)
      .def("__repr__", [](const Node& n) {
        return "<Node " + std::to_string(n.id.value) + " " + n.name + " " + std::string(to_string(n.kind)) + ">";
      });

  py::class_<Topology>(m, "Topology")
      .def_property_readonly("nodes", &Topology::nodes)
      .def_property_readonly("levels", &Topology::levels)
      .def("node", [](const Topology& t, std::uint32_t id) { return t.node(node(id)); })
      .def("assigned_edge", [](const Topology& t, std::uint32_t id) { return t.assigned_edge(node(id)).value; })
      .def("cloud_of", [](const Topology& t, std::uint32_t id) { return t.cloud_of(node(id)).value; })
      .def("route", [](const Topology& t, std::uint32_t src, std::uint32_t dst) {
        return path_to_list(route(t, node(src), node(dst)));
      }, "Hops as (src, dst, one_way_latency_us) tuples.")
      .def("path_latency", [](const Topology& t, std::uint32_t src, std::uint32_t dst) {
        return path_latency(t, route(t, node(src), node(dst)));
      }, "One-way latency in microseconds along the route from src to dst.")
      .def("check_invariants", [](const Topology& t) { return check_invariants(t); });

  // Scenario --------------------------------------------------------------------
  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_readwrite("name", &ScenarioConfig::name)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("horizon", &ScenarioConfig::horizon)
      .def_readwrite("warmup", &ScenarioConfig::warmup)
      .def_readwrite("sync_interval", &ScenarioConfig::sync_interval)
      .def_readwrite("users", &ScenarioConfig::users)
      .def_readwrite("user_counts", &ScenarioConfig::user_counts)
      .def_property("rate", [](const ScenarioConfig& c) { return c.workload.rate; },
                    [](ScenarioConfig& c, double r) { c.workload.rate = r; })
      .def_property("cloud_fraction", [](const ScenarioConfig& c) { return c.workload.cloud_fraction; },
                    [](ScenarioConfig& c, double f) { c.workload.cloud_fraction = f; })
      .def_property_readonly("fog_model", [](const ScenarioConfig& c) { return describe(c.fog_model); })
      .def("validate", &ScenarioConfig::validate, py::arg("users"))
      .def("topology", [](const ScenarioConfig& c, std::size_t users) { return build_topology(c.topology_for(users)); },
           py::arg("users"))
      .def("__eq__", [](const ScenarioConfig& a, const ScenarioConfig& b) { return a == b; })
      .def("__str__", &format_scenario);

  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("origin") = "<string>");
  m.def("format_scenario", &format_scenario, py::arg("config"));

  // Metrics -------------------------------------------------------------------------
  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("scenario", &MetricsReport::scenario)
      .def_readonly("user_count", &MetricsReport::user_count)
      .def_readonly("mean_response", &MetricsReport::mean_response)
      .def_readonly("response_count", &MetricsReport::response_count)
      .def_readonly("dropped_count", &MetricsReport::dropped_count)
      .def_readonly("issued_count", &MetricsReport::issued_count)
      .def_readonly("in_flight_count", &MetricsReport::in_flight_count)
      .def_readonly("edge_cloud_bytes", &MetricsReport::edge_cloud_bytes)
      .def_property_readonly("link_traffic", [](const MetricsReport& r) { return traffic_to_dict(r.link_traffic); });

  py::class_<ComparisonReport>(m, "ComparisonReport")
      .def_readonly("user_count", &ComparisonReport::user_count)
      .def_readonly("mean_cloud", &ComparisonReport::mean_cloud)
      .def_readonly("mean_fog", &ComparisonReport::mean_fog)
      .def_readonly("edge_cloud_bytes_cloud", &ComparisonReport::edge_cloud_bytes_cloud)
      .def_readonly("edge_cloud_bytes_fog", &ComparisonReport::edge_cloud_bytes_fog)
      .def_readonly("rt_improvement_pct", &ComparisonReport::rt_improvement_pct)
      .def_readonly("traffic_reduction_pct", &ComparisonReport::traffic_reduction_pct);

  m.def("compare", &compare, py::arg("cloud_report"), py::arg("fog_report"));

  // Simulation ------------------------------------------------------------------
  py::class_<Simulation>(m, "Simulation")
      .def(py::init([](const ScenarioConfig& c, std::size_t users, RunMode mode, bool trace) {
             return std::make_unique<Simulation>(c, users, mode, RunOptions{trace, nullptr});
           }),
           py::arg("config"), py::arg("users"), py::arg("mode") = RunMode::Fog, py::arg("trace") = false)
      .def("run", &Simulation::run, py::call_guard<py::gil_scoped_release>())
      .def("flush_sync", [](Simulation& s) { return s.flush_sync().size(); },
           "Delivers pending edge state to the cloud; returns the number of deltas applied.")
      .def_property_readonly("topology", &Simulation::topology, py::return_value_policy::reference_internal)
      .def_property_readonly("global_view", [](const Simulation& s) { return view_to_dict(s.global_view().entries); })
      .def_property_readonly("trace", [](const Simulation& s) { return trace_to_list(s.trace()); })
      .def_property_readonly("request_count", [](const Simulation& s) { return s.workload().size(); })
      .def_property_readonly("placements", [](const Simulation& s) {
        std::vector<std::uint32_t> out;
        for (auto n : s.placements()) out.push_back(n.value);
        return out;
      });

  // Experiments -----------------------------------------------------------------
  py::class_<ExperimentEntry>(m, "ExperimentEntry")
      .def_readonly("users", &ExperimentEntry::users)
      .def_readonly("cloud", &ExperimentEntry::cloud)
      .def_readonly("fog", &ExperimentEntry::fog)
      .def_readonly("comparison", &ExperimentEntry::comparison);

  py::class_<ExperimentResult>(m, "ExperimentResult")
      .def_readonly("scenario", &ExperimentResult::scenario)
      .def_readonly("entries", &ExperimentResult::entries)
      .def("summary_csv", [](const ExperimentResult& r) {
        std::ostringstream os;
        write_summary_csv(os, r);
        return os.str();
      });

  m.def(
      "run_experiment",
      [](const ScenarioConfig& c, std::optional<std::vector<std::size_t>> user_counts, bool trace, unsigned jobs) {
        py::gil_scoped_release release;
        return run_experiment(c, user_counts.value_or(c.user_counts), ExperimentOptions{trace, jobs});
      },
      py::arg("config"), py::arg("user_counts") = py::none(), py::arg("trace") = false, py::arg("jobs") = 1);
  m.def(
      "write_reports",
      [](const ExperimentResult& r, const std::filesystem::path& out) {
        std::vector<std::string> paths;
        for (const auto& p : write_reports(r, out)) paths.push_back(p.string());
        return paths;
      },
      py::arg("result"), py::arg("out_dir"));

  // Placement primitives --------------------------------------------------------
  m.def(
      "aggregate_batch",
      [](const std::vector<Bytes>& payloads, double filter_ratio, Bytes header_bytes) {
        std::vector<SensorReading> readings;
        for (auto b : payloads) readings.push_back(SensorReading{NodeId{}, b, 0});
        const auto msg = aggregate_batch(readings, filter_ratio, header_bytes);
        return py::make_tuple(msg.bytes, msg.readings, msg.payload_bytes);
      },
      py::arg("payloads"), py::arg("filter_ratio"), py::arg("header_bytes") = 32,
      "Returns (wire_bytes, reading_count, payload_bytes).");

  m.def(
      "share_assign",
      [](std::size_t tasks, const std::vector<std::pair<std::uint32_t, std::uint64_t>>& peers, SharePolicy policy) {
        std::vector<std::pair<NodeId, std::uint64_t>> in;
        for (auto [id, w] : peers) in.emplace_back(NodeId{id}, w);
        const auto a = share_assign(tasks, in, policy);
        std::vector<std::uint32_t> to_peer;
        for (auto n : a.task_to_peer) to_peer.push_back(n.value);
        return py::make_tuple(to_peer, a.loads);
      },
      py::arg("tasks"), py::arg("peers"), py::arg("policy") = SharePolicy::RoundRobin,
      "peers is a list of (node_id, weight); returns (task_to_peer, loads).");

  py::class_<ServerQueue>(m, "ServerQueue")
      .def(py::init<SimTime, std::optional<std::uint32_t>, std::optional<std::uint32_t>>(), py::arg("service_time"),
           py::arg("capacity") = py::none(), py::arg("max_queue") = py::none())
      .def("admit", &ServerQueue::admit, py::arg("arrival"))
      .def("queue_and_serve", &ServerQueue::queue_and_serve, py::arg("arrival"))
      .def_property_readonly("dropped", &ServerQueue::dropped)
      .def_property_readonly("served", &ServerQueue::served);
}
