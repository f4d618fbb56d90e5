#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fogsim/error.hpp"
#include "fogsim/experiment.hpp"

using namespace fogsim;
namespace fs = std::filesystem;

namespace {

ScenarioConfig small_config() {
  auto cfg = load_scenario(fs::path(FOGSIM_SCENARIO_DIR) / "default.scenario");
  cfg.horizon = seconds(20);
  return cfg;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("fogsim_experiment_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("summary has a header and one row per user count in sweep order") {
  const auto result = run_experiment(small_config(), {10, 1, 5});
  std::ostringstream os;
  write_summary_csv(os, result);
  const auto rows = lines(os.str());
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].rfind("users,mean_cloud_us,mean_fog_us,rt_improvement_pct", 0) == 0);
  CHECK(rows[1].rfind("10,", 0) == 0);
  CHECK(rows[2].rfind("1,", 0) == 0);
  CHECK(rows[3].rfind("5,", 0) == 0);
  for (const auto& e : result.entries) {
    CHECK(e.comparison.user_count == e.users);
    CHECK(e.cloud.scenario == "default/cloud");
    CHECK(e.fog.scenario == "default/fog");
    CHECK(e.comparison.mean_cloud == *e.cloud.mean_response);
    CHECK(e.comparison.edge_cloud_bytes_fog == e.fog.edge_cloud_bytes);
  }
}

TEST_CASE("parallel and serial sweeps agree and reruns are byte-identical") {
  const auto cfg = small_config();
  const std::vector<std::size_t> counts{1, 5, 10, 25};
  const auto a = scratch("serial");
  const auto b = scratch("parallel");
  const auto c = scratch("again");
  const auto written = write_reports(run_experiment(cfg, counts, {true, 1}), a);
  write_reports(run_experiment(cfg, counts, {true, 4}), b);
  write_reports(run_experiment(cfg, counts, {true, 0}), c);
  CHECK(written.size() == 1 + counts.size() * 3);
  for (const auto& p : written) {
    CAPTURE(p.string());
    const auto body = slurp(p);
    CHECK_FALSE(body.empty());
    CHECK(body == slurp(b / p.filename()));
    CHECK(body == slurp(c / p.filename()));
  }
  CHECK(fs::exists(a / "trace_25.csv"));
  CHECK(fs::exists(a / "trace_25_cloud.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(c);
}

TEST_CASE("without traces only summary and link files are written") {
  const auto dir = scratch("notrace");
  const auto written = write_reports(run_experiment(small_config(), {1, 5}), dir);
  CHECK(written.size() == 3);
  CHECK(fs::exists(dir / "links_5.csv"));
  CHECK_FALSE(fs::exists(dir / "trace_5.csv"));
  fs::remove_all(dir);
}

TEST_CASE("baseline traffic grows with the user count") {
  const auto result = run_experiment(small_config(), {1, 5, 10, 25, 50});
  for (std::size_t i = 1; i < result.entries.size(); ++i) {
    CHECK(result.entries[i].cloud.edge_cloud_bytes > result.entries[i - 1].cloud.edge_cloud_bytes);
    CHECK(result.entries[i].fog.edge_cloud_bytes > result.entries[i - 1].fog.edge_cloud_bytes);
  }
}

TEST_CASE("sweep errors") {
  const auto cfg = small_config();
  CHECK_THROWS_WITH_AS(run_experiment(cfg, {5, 5}), doctest::Contains("twice"), Error);
  CHECK_THROWS_AS(run_experiment(cfg, {}), Error);
  CHECK_THROWS_AS(run_experiment(cfg, {0}), Error);

  const auto dir = scratch("empty");
  try {
    write_reports(ExperimentResult{}, dir);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("an unwritable output directory is an I/O error") {
  const auto blocker = scratch("blocker");
  { std::ofstream(blocker) << "file, not a directory"; }
  try {
    write_reports(run_experiment(small_config(), {1}), blocker / "sub");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
  fs::remove(blocker);
}
