#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "fogsim/engine.hpp"
#include "fogsim/metrics.hpp"
#include "fogsim/scenario.hpp"

namespace fogsim {

struct ExperimentEntry {
  std::size_t users = 0;
  MetricsReport cloud;
  MetricsReport fog;
  ComparisonReport comparison;
  EventTrace cloud_trace;  // empty unless traces were requested
  EventTrace fog_trace;
};

struct ExperimentResult {
  std::string scenario;
  std::vector<ExperimentEntry> entries;  // one per user count, in sweep order
};

struct ExperimentOptions {
  bool record_trace = false;
  unsigned jobs = 1;  // concurrent user counts; 0 picks the hardware thread count
};

/// Runs a cloud-only and a fog simulation per user count with the same seed
/// and arrival sequence. Throws ValidationError for a duplicated user count.
ExperimentResult run_experiment(const ScenarioConfig& config, const std::vector<std::size_t>& user_counts,
                                const ExperimentOptions& options = {});

/// Writes summary.csv, links_<n>.csv and, when traces are present,
/// trace_<n>.csv (fog run) plus trace_<n>_cloud.csv. Returns the paths written.
/// Throws InvalidArgument for an empty result and IoError on write failures.
std::vector<std::filesystem::path> write_reports(const ExperimentResult& result, const std::filesystem::path& out_dir);

/// The summary.csv body.
void write_summary_csv(std::ostream& os, const ExperimentResult& result);

}  // namespace fogsim
