#include "fogsim/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "fogsim/error.hpp"
#include "fogsim/simulation.hpp"

namespace fogsim {

namespace {

ExperimentEntry run_pair(const ScenarioConfig& config, std::size_t users, bool record_trace) {
  ExperimentEntry entry;
  entry.users = users;
  {
    Simulation cloud(config, users, RunMode::CloudOnly, RunOptions{record_trace, nullptr});
    entry.cloud = cloud.run();
    if (record_trace) entry.cloud_trace = cloud.trace();
  }
  {
    Simulation fog(config, users, RunMode::Fog, RunOptions{record_trace, nullptr});
    entry.fog = fog.run();
    if (record_trace) entry.fog_trace = fog.trace();
  }
  entry.comparison = compare(entry.cloud, entry.fog);
  return entry;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << body;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write to " + path.string() + " failed");
}

}  // namespace

ExperimentResult run_experiment(const ScenarioConfig& config, const std::vector<std::size_t>& user_counts,
                                const ExperimentOptions& options) {
  if (user_counts.empty()) throw Error(ErrorCode::ValidationError, "no user counts to run");
  std::set<std::size_t> seen;
  for (auto n : user_counts) {
    if (!seen.insert(n).second) {
      throw Error(ErrorCode::ValidationError, "user count " + std::to_string(n) + " appears twice in the sweep");
    }
    config.validate(n);
  }

  ExperimentResult result;
  result.scenario = config.name;
  result.entries.resize(user_counts.size());
  unsigned jobs = options.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.jobs;
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(user_counts.size()));

  if (jobs <= 1) {
    for (std::size_t i = 0; i < user_counts.size(); ++i) {
      result.entries[i] = run_pair(config, user_counts[i], options.record_trace);
    }
    return result;
  }
  // Largest sweeps first so the slowest runs start early.
  std::vector<std::size_t> order(user_counts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return user_counts[a] > user_counts[b]; });

  std::size_t next = 0;
  while (next < order.size()) {
    std::vector<std::pair<std::size_t, std::future<ExperimentEntry>>> batch;
    for (unsigned j = 0; j < jobs && next < order.size(); ++j, ++next) {
      const auto idx = order[next];
      batch.emplace_back(idx, std::async(std::launch::async, run_pair, std::cref(config), user_counts[idx],
                                         options.record_trace));
    }
    for (auto& [idx, fut] : batch) result.entries[idx] = fut.get();
  }
  return result;
}

void write_summary_csv(std::ostream& os, const ExperimentResult& result) {
  os << "users,mean_cloud_us,mean_fog_us,rt_improvement_pct,edge_cloud_bytes_cloud,edge_cloud_bytes_fog,"
        "traffic_reduction_pct,responses_cloud,responses_fog,dropped_cloud,dropped_fog\n";
  os << std::fixed << std::setprecision(4);
  for (const auto& e : result.entries) {
    const auto& c = e.comparison;
    os << e.users << ',' << c.mean_cloud << ',' << c.mean_fog << ',' << c.rt_improvement_pct << ','
       << c.edge_cloud_bytes_cloud << ',' << c.edge_cloud_bytes_fog << ',' << c.traffic_reduction_pct << ','
       << e.cloud.response_count << ',' << e.fog.response_count << ',' << e.cloud.dropped_count << ','
       << e.fog.dropped_count << '\n';
  }
}

std::vector<std::filesystem::path> write_reports(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  if (result.entries.empty()) throw Error(ErrorCode::InvalidArgument, "experiment result is empty");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

  // Render everything first so a failure leaves no partial set behind.
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  {
    std::ostringstream os;
    write_summary_csv(os, result);
    files.emplace_back(out_dir / "summary.csv", os.str());
  }
  for (const auto& e : result.entries) {
    std::ostringstream os;
    write_metrics_csv(os, e.cloud, true);
    write_metrics_csv(os, e.fog, false);
    files.emplace_back(out_dir / ("links_" + std::to_string(e.users) + ".csv"), os.str());
    if (!e.fog_trace.empty()) {
      std::ostringstream fog;
      write_trace_csv(fog, e.fog_trace);
      files.emplace_back(out_dir / ("trace_" + std::to_string(e.users) + ".csv"), fog.str());
    }
    if (!e.cloud_trace.empty()) {
      std::ostringstream cloud;
      write_trace_csv(cloud, e.cloud_trace);
      files.emplace_back(out_dir / ("trace_" + std::to_string(e.users) + "_cloud.csv"), cloud.str());
    }
  }
  std::vector<std::filesystem::path> written;
  for (const auto& [path, body] : files) {
    write_file(path, body);
    written.push_back(path);
  }
  return written;
}

}  // namespace fogsim
