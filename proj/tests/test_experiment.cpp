// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "riseig/experiment.hpp"
#include "riseig/scenario.hpp"

using namespace riseig;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (char c : text) {
    if (c == '\n') ++lines;
  }
  return lines;
}

std::string temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("riseig_test_" + tag);
  std::filesystem::remove_all(dir);
  return dir.string();
}

/// Desk-size eigenvalue scenario: small enough for unit-test budgets.
ScenarioConfig tiny_eigenvalue_config() {
  ScenarioConfig config = preset("fig1a");
  config.name = "tiny_eig";
  config.dimensions = SystemDimensions{6, 1, 3, {6}};
  config.extra_loss_users = {2};
  config.rank_grid = {1, 2};
  config.n_trials = 3;
  config.seed = 99;
  return config;
}

ScenarioConfig tiny_snr_config() {
  ScenarioConfig config = preset("fig3a");
  config.name = "tiny_snr";
  config.dimensions = SystemDimensions{6, 1, 3, {4}};
  config.power_grid_dbm = {0.0, 20.0};
  config.n_trials = 3;
  config.seed = 7;
  return config;
}

ScenarioConfig tiny_element_config() {
  ScenarioConfig config = preset("fig4b");
  config.name = "tiny_el";
  config.dimensions = SystemDimensions{6, 1, 3, {4}};
  config.ris_element_grid = {2, 4};
  config.n_trials = 3;
  config.seed = 13;
  return config;
}

}  // namespace

TEST_CASE("presets carry the documented parameters") {
  const ScenarioConfig a = preset("fig1a");
  CHECK(a.experiment == ExperimentKind::Eigenvalue);
  CHECK(a.dimensions.n_bs == 16);
  CHECK(a.dimensions.n_users == 6);
  CHECK(a.dimensions.n_ris_elements == std::vector<int>{512});
  CHECK(a.pathloss.direct.beta == 3.76);
  CHECK(a.pathloss.reflect.beta == 3.76);
  CHECK(a.pathloss.bs_ris.beta == 2.2);
  CHECK(a.fading.bs_ris.kind == FadingKind::KroneckerRank);
  CHECK(a.rank_grid == std::vector<int>{1});
  CHECK(a.extra_loss_db == 20.0);
  CHECK(a.extra_loss_users == std::vector<int>{3, 4, 5});
  CHECK(a.noise_dbm == -100.0);
  CHECK(a.n_trials == 100);

  CHECK(preset("fig1b").rank_grid == std::vector<int>{2});
  CHECK(preset("fig1c").rank_grid == std::vector<int>{6});
  const ScenarioConfig d = preset("fig1d");
  CHECK(d.rank_grid == std::vector<int>{6});
  CHECK(d.pathloss.reflect.beta == 2.2);

  const ScenarioConfig f3 = preset("fig3b");
  CHECK(f3.experiment == ExperimentKind::SnrSweep);
  CHECK(f3.fading.bs_ris.kind == FadingKind::Rician);
  CHECK(f3.fading.bs_ris.rician_factor_db == 6.0);
  CHECK(f3.power_grid_dbm.size() == 11);
  CHECK(f3.power_grid_dbm.front() == -10.0);
  CHECK(f3.power_grid_dbm.back() == 40.0);
  CHECK(f3.extra_loss_users.empty());

  const ScenarioConfig f4 = preset("fig4a");
  CHECK(f4.experiment == ExperimentKind::ElementSweep);
  CHECK(f4.ris_element_grid == std::vector<int>{1, 4, 16, 64, 256});
  CHECK(f4.element_sweep_power_dbm == 40.0);
  CHECK(f4.fading.bs_ris.kind == FadingKind::Rayleigh);

  CHECK(preset_names().size() == 8);
  CHECK_THROWS_AS(preset("fig9z"), DomainError);
}

TEST_CASE("config text round trip") {
  const std::string text = R"(
# exercise every section
experiment = "element_sweep"
name = "parse_check"
seed = 4242
trials = 17
threads = 3
output_dir = "somewhere"
noise_dbm = -90.0

[dimensions]
n_bs = 8
n_ms = 1
n_users = 4
n_ris_elements = [5]

[geometry]
bs = [1.0, 2.0]
ris = [[100.0, 0.0]]
user_disk_center = [100.0, 20.0]
user_disk_radius = 5.0

[pathloss.direct]
alpha_db = 28.0
beta = 3.5
[pathloss.reflect]
beta = 2.4
[pathloss.bs_ris]
beta = 2.1

[fading.bs_ris]
kind = "rician"
rician_factor_db = 9.0

[extra_loss]
loss_db = 20.0
users = [3, 4]

[grid]
ris_elements = [2, 5]
element_sweep_power_dbm = 37.0
)";
  const ScenarioConfig config = parse_config_text(text, "inline");
  CHECK(config.experiment == ExperimentKind::ElementSweep);
  CHECK(config.name == "parse_check");
  CHECK(config.seed == 4242);
  CHECK(config.n_trials == 17);
  CHECK(config.n_threads == 3);
  CHECK(config.output_dir == "somewhere");
  CHECK(config.noise_dbm == -90.0);
  CHECK(config.dimensions.n_bs == 8);
  CHECK(config.dimensions.n_users == 4);
  CHECK(config.dimensions.n_ris_elements == std::vector<int>{5});
  CHECK(config.bs_position.x == 1.0);
  CHECK(config.ris_positions.size() == 1);
  CHECK(config.ris_positions[0].x == 100.0);
  CHECK(config.user_disk_center.y == 20.0);
  CHECK(config.user_disk_radius == 5.0);
  CHECK(config.pathloss.direct.alpha_db == 28.0);
  CHECK(config.pathloss.direct.beta == 3.5);
  CHECK(config.pathloss.reflect.beta == 2.4);
  CHECK(config.pathloss.bs_ris.beta == 2.1);
  CHECK(config.fading.bs_ris.kind == FadingKind::Rician);
  CHECK(config.fading.bs_ris.rician_factor_db == 9.0);
  CHECK(config.extra_loss_db == 20.0);
  CHECK(config.extra_loss_users == std::vector<int>{2, 3});  // 0-based
  CHECK(config.ris_element_grid == std::vector<int>{2, 5});
  CHECK(config.element_sweep_power_dbm == 37.0);
}

TEST_CASE("config parser rejects malformed input") {
  CHECK_THROWS_AS(parse_config_text("trials = 5\n"), DomainError);  // no experiment
  CHECK_THROWS_AS(parse_config_text("experiment = \"eigenvalue\"\nbogus_key = 1\n"),
                  DomainError);
  CHECK_THROWS_AS(parse_config_text("experiment = \"eigenvalue\"\nnot a kv line\n"),
                  DomainError);
  CHECK_THROWS_AS(parse_config_text("experiment = \"eigenvalue\"\nseed = [1,\n"),
                  DomainError);
  CHECK_THROWS_AS(
      parse_config_text("experiment = \"eigenvalue\"\nseed = 1\nseed = 2\n"),
      DomainError);
  CHECK_THROWS_AS(parse_config_text("experiment = \"warp_drive\"\n"), DomainError);
  CHECK_THROWS_AS(
      parse_config_text("experiment = \"eigenvalue\"\n[extra_loss]\nusers = [0]\n"),
      DomainError);
  CHECK_THROWS_AS(parse_config_text("experiment = \"eigenvalue\"\nseed = \"x\"\n"),
                  DomainError);
}

TEST_CASE("config seeds keep full 64-bit precision") {
  const ScenarioConfig config = parse_config_text(
      "experiment = \"eigenvalue\"\nseed = 18446744073709551557\n");
  CHECK(config.seed == 18446744073709551557ULL);
}

TEST_CASE("config files inherit the documented grid defaults") {
  const ScenarioConfig snr = parse_config_text("experiment = \"snr_sweep\"\n");
  REQUIRE(snr.power_grid_dbm.size() == 11);
  CHECK(snr.power_grid_dbm.front() == -10.0);
  CHECK(snr.power_grid_dbm.back() == 40.0);

  const ScenarioConfig el = parse_config_text("experiment = \"element_sweep\"\n");
  CHECK(el.ris_element_grid == std::vector<int>{1, 4, 16, 64, 256});

  const ScenarioConfig eig = parse_config_text("experiment = \"eigenvalue\"\n");
  CHECK(eig.rank_grid == std::vector<int>{1, 2, 6});
}

TEST_CASE("config file loading matches text parsing") {
  const std::string dir = temp_dir("cfg");
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/case.toml";
  const std::string text = "experiment = \"snr_sweep\"\n[grid]\npower_dbm = [0, 10]\n";
  std::ofstream(path) << text;
  const ScenarioConfig from_file = load_config_file(path);
  const ScenarioConfig from_text = parse_config_text(text);
  CHECK(from_file.experiment == from_text.experiment);
  CHECK(from_file.power_grid_dbm == from_text.power_grid_dbm);
  CHECK(from_file.n_trials == 1000);  // config files default to paper scale
  CHECK_THROWS_AS(load_config_file(dir + "/missing.toml"), DomainError);
}

TEST_CASE("eigenvalue experiment shape, determinism and thread independence") {
  ScenarioConfig config = tiny_eigenvalue_config();
  const EigenvalueExperimentResult result = run_eigenvalue_experiment(config);

  REQUIRE(result.cells.size() == 2);
  for (const auto& cell : result.cells) {
    CHECK(cell.failures.empty());
    CHECK(cell.records.size() == 4 * 3);  // methods x trials
    for (const auto& record : cell.records) {
      CHECK(record.eigenvalues.size() == 3);
      // Spectra are descending and nonnegative.
      for (int i = 1; i < 3; ++i) {
        CHECK(record.eigenvalues(i) <= record.eigenvalues(i - 1));
        CHECK(record.eigenvalues(i) >= 0.0);
      }
    }
    CHECK_NOTHROW(mean_eigenvalues(cell, EigMethod::GeoMean));
  }

  const std::string dir_a = temp_dir("eig_a");
  const std::string dir_b = temp_dir("eig_b");
  const auto files_a = write_outputs(result, dir_a);
  REQUIRE(files_a.size() == 2);

  config.n_threads = 3;
  const EigenvalueExperimentResult threaded = run_eigenvalue_experiment(config);
  write_outputs(threaded, dir_b);
  CHECK(slurp(dir_a + "/tiny_eig_eigenvalues.csv") ==
        slurp(dir_b + "/tiny_eig_eigenvalues.csv"));

  const std::string csv = slurp(dir_a + "/tiny_eig_eigenvalues.csv");
  CHECK(csv.rfind("rank,method,eig_index,mean_value\n", 0) == 0);
  // header + ranks * (methods * r + failures summary)
  CHECK(count_lines(csv) == 1 + 2 * (4 * 3 + 1));
  CHECK(csv.find("1,Failures,0,0") != std::string::npos);

  const auto metadata = nlohmann::json::parse(slurp(dir_a + "/tiny_eig_metadata.json"));
  CHECK(metadata["artifact"] == "riseig");
  CHECK(metadata["config"]["seed"] == 99);
  CHECK(metadata["config"]["grid"]["ranks"] == nlohmann::json({1, 2}));
}

TEST_CASE("eigenvalue experiment validates the feeder model") {
  ScenarioConfig config = tiny_eigenvalue_config();
  config.fading.bs_ris.kind = FadingKind::Rayleigh;
  CHECK_THROWS_AS(run_eigenvalue_experiment(config), DomainError);

  ScenarioConfig no_grid = tiny_eigenvalue_config();
  no_grid.rank_grid.clear();
  CHECK_THROWS_AS(run_eigenvalue_experiment(no_grid), DomainError);

  ScenarioConfig bad_rank = tiny_eigenvalue_config();
  bad_rank.rank_grid = {7};
  CHECK_THROWS_AS(run_eigenvalue_experiment(bad_rank), DomainError);
}

TEST_CASE("snr sweep shape and determinism") {
  ScenarioConfig config = tiny_snr_config();
  const SnrSweepResult result = run_snr_sweep(config);
  CHECK(result.failures.empty());
  CHECK(result.records.size() == 12 * 3);  // methods x trials
  for (const auto& record : result.records) {
    CHECK(record.rates.size() == 2);
  }

  // Rates increase with power for the finite schemes.
  for (RateMethod method : {RateMethod::DpcOpt, RateMethod::ZfOff}) {
    const MeanStderr low = rate_statistics(result.records, method, 0);
    const MeanStderr high = rate_statistics(result.records, method, 1);
    CHECK(low.n == 3);
    CHECK(high.mean > low.mean);
  }

  const std::string dir_a = temp_dir("snr_a");
  write_outputs(result, dir_a);
  const std::string csv = slurp(dir_a + "/tiny_snr_rates.csv");
  CHECK(csv.rfind("x,method,mean_rate_bpcu,stderr\n", 0) == 0);
  CHECK(count_lines(csv) == 1 + 2 * 12 + 1);
  CHECK(csv.find("all,Failures,0,0") != std::string::npos);
  CHECK(csv.find("ApproxHar-haropt") == std::string::npos);

  config.n_threads = 2;
  const std::string dir_b = temp_dir("snr_b");
  write_outputs(run_snr_sweep(config), dir_b);
  CHECK(slurp(dir_a + "/tiny_snr_rates.csv") == slurp(dir_b + "/tiny_snr_rates.csv"));

  ScenarioConfig empty = config;
  empty.power_grid_dbm.clear();
  CHECK_THROWS_AS(run_snr_sweep(empty), DomainError);
}

TEST_CASE("element sweep shape and determinism") {
  ScenarioConfig config = tiny_element_config();
  const ElementSweepResult result = run_element_sweep(config);
  REQUIRE(result.cells.size() == 2);
  CHECK(result.cells[0].n_ris == 2);
  CHECK(result.cells[1].n_ris == 4);
  for (const auto& cell : result.cells) {
    CHECK(cell.failures.empty());
    CHECK(cell.records.size() == 13 * 3);
    for (const auto& record : cell.records) CHECK(record.rates.size() == 1);
  }

  const std::string dir_a = temp_dir("el_a");
  write_outputs(result, dir_a);
  const std::string csv = slurp(dir_a + "/tiny_el_rates.csv");
  CHECK(count_lines(csv) == 1 + 2 * (13 + 1));
  CHECK(csv.find("ApproxHar-haropt") != std::string::npos);

  config.n_threads = 3;
  const std::string dir_b = temp_dir("el_b");
  write_outputs(run_element_sweep(config), dir_b);
  CHECK(slurp(dir_a + "/tiny_el_rates.csv") == slurp(dir_b + "/tiny_el_rates.csv"));

  ScenarioConfig two_surfaces = config;
  two_surfaces.dimensions.n_ris_elements = {4, 4};
  two_surfaces.ris_positions = {{200.0, 0.0}, {180.0, 0.0}};
  CHECK_THROWS_AS(run_element_sweep(two_surfaces), DomainError);
}

TEST_CASE("off curves are bit-identical across the element grid") {
  ScenarioConfig config = tiny_element_config();
  const ElementSweepResult result = run_element_sweep(config);
  const auto off_small = per_trial_rates(result.cells[0].records, RateMethod::DpcOff, 0);
  const auto off_large = per_trial_rates(result.cells[1].records, RateMethod::DpcOff, 0);
  REQUIRE(off_small.size() == off_large.size());
  for (std::size_t i = 0; i < off_small.size(); ++i) {
    CHECK(off_small[i] == off_large[i]);
  }
}

TEST_CASE("a single reflecting element has no measurable effect") {
  ScenarioConfig config = preset("fig4a");
  config.name = "tiny_one";
  config.ris_element_grid = {1};
  config.n_trials = 8;
  config.seed = 21;
  const ElementSweepResult result = run_element_sweep(config);
  const auto& records = result.cells.front().records;
  const MeanStderr opt = rate_statistics(records, RateMethod::DpcOpt, 0);
  const MeanStderr off = rate_statistics(records, RateMethod::DpcOff, 0);
  CHECK(std::abs(opt.mean - off.mean) <= 3.0 * (opt.std_error + off.std_error) + 1e-6);
}

TEST_CASE("optimized rates climb one decade of power at the full slope") {
  // r log2(10) = 19.93 bits per 10 dB at high SNR.
  ScenarioConfig config = preset("fig3a");
  config.name = "tiny_slope";
  config.dimensions.n_ris_elements = {32};
  config.power_grid_dbm = {30.0, 40.0};
  config.n_trials = 3;
  config.seed = 5;
  const SnrSweepResult result = run_snr_sweep(config);
  for (RateMethod method : {RateMethod::DpcOpt, RateMethod::ZfOpt}) {
    const MeanStderr low = rate_statistics(result.records, method, 0);
    const MeanStderr high = rate_statistics(result.records, method, 1);
    CHECK(std::abs(high.mean - low.mean - 19.931568569324174) < 1.0);
  }
}

TEST_CASE("median helper") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK_THROWS_AS(median({}), DomainError);
}

TEST_CASE("per-trial rate extraction matches the records") {
  const SnrSweepResult result = run_snr_sweep(tiny_snr_config());
  const auto rates = per_trial_rates(result.records, RateMethod::DpcOpt, 1);
  REQUIRE(rates.size() == 3);
  const MeanStderr stats = rate_statistics(result.records, RateMethod::DpcOpt, 1);
  double sum = 0.0;
  for (double r : rates) sum += r;
  CHECK(stats.mean == doctest::Approx(sum / 3.0).epsilon(1e-12));
}
