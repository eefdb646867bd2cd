// SPDX-License-Identifier: Apache-2.0
#include "riseig/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "riseig/channel_model.hpp"
#include "riseig/phase_optimizer.hpp"
#include "riseig/rate_evaluation.hpp"
#include "riseig/spectral_metrics.hpp"
#include "riseig/version.hpp"

namespace riseig {

namespace {

constexpr int kOptimizerMaxSweeps = 100;
constexpr double kOptimizerTol = 1e-9;
constexpr double kDpcTol = 1e-10;
constexpr int kDpcMaxIter = 5000;

using ordered_json = nlohmann::ordered_json;

std::string format_value(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

int resolve_threads(const ScenarioConfig& config) {
  if (config.n_threads > 0) return config.n_threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs body(trial) for every trial on a small worker pool. The body owns its
/// slot in a preallocated result vector, so no synchronization is needed
/// beyond the shared counter and the result is independent of scheduling.
template <typename Body>
void parallel_trials(int n_trials, int n_threads, const Body& body) {
  n_threads = std::min(n_threads, n_trials);
  if (n_threads <= 1) {
    for (int i = 0; i < n_trials; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    workers.emplace_back([&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n_trials) break;
        body(i);
      }
    });
  }
  for (auto& worker : workers) worker.join();
}

struct TrialOutcome {
  bool ok = false;
  std::vector<TrialRecord> records;
  std::string error;
};

/// Offsets of the noise-normalized channel H / sigma, used for the high-SNR
/// approximation lines.
struct ApproxOffsets {
  double geo_bits;
  double har_bits;
};

ApproxOffsets approx_offsets(const CMatrix& h_eff, double noise_watts) {
  const CMatrix scaled = h_eff / std::sqrt(noise_watts);
  const EigenSpectrum spectrum = gram_spectrum(scaled);
  const SpectrumMeans means = spectrum_means(spectrum);
  const double r = static_cast<double>(spectrum.r());
  return ApproxOffsets{dpc_offset(scaled), r * std::log2(means.harmonic)};
}

struct OptimizedPhases {
  CVector theta0;
  OptimizeResult geo;
  OptimizeResult har;
};

OptimizedPhases optimize_both(const ChannelSet& channels, Rng& rng) {
  OptimizedPhases out;
  out.theta0 = random_phases(rng, channels.total_ris_elements());
  OptimizerConfig config;
  config.max_sweeps = kOptimizerMaxSweeps;
  config.rel_tolerance = kOptimizerTol;
  config.init = PhaseInit::Given;
  config.initial_phases = out.theta0;
  out.geo = optimize_geo_mean(channels, config, rng);
  out.har = optimize_har_mean(channels, config, rng);
  return out;
}

TrialOutcome eigenvalue_trial(const ScenarioConfig& cell_config, int trial,
                              std::uint64_t stream) {
  TrialOutcome outcome;
  try {
    Rng rng = Rng::substream(cell_config.seed, stream);
    const ChannelSet channels = build_scenario_channels(rng, cell_config);
    const OptimizedPhases phases = optimize_both(channels, rng);

    const auto spectrum_of = [&](const PhaseConfig& config) {
      return gram_spectrum(compose_effective(channels, config)).values;
    };

    TrialRecord geo{trial, to_string(EigMethod::GeoMean),
                    spectrum_of(to_phase_config(channels, phases.geo.theta)), {},
                    phases.geo.trace.sweeps_run};
    TrialRecord har{trial, to_string(EigMethod::HarMean),
                    spectrum_of(to_phase_config(channels, phases.har.theta)), {},
                    phases.har.trace.sweeps_run};
    TrialRecord random{trial, to_string(EigMethod::Random),
                       spectrum_of(to_phase_config(channels, phases.theta0)), {}, 0};
    TrialRecord off{trial, to_string(EigMethod::Off),
                    spectrum_of(PhaseConfig::off()), {}, 0};
    outcome.records = {std::move(geo), std::move(har), std::move(random), std::move(off)};
    outcome.ok = true;
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  return outcome;
}

TrialOutcome rate_trial(const ScenarioConfig& cell_config, int trial,
                        std::uint64_t stream, const std::vector<double>& powers_dbm,
                        bool include_har_har) {
  TrialOutcome outcome;
  try {
    Rng rng = Rng::substream(cell_config.seed, stream);
    const ChannelSet channels = build_scenario_channels(rng, cell_config);
    const OptimizedPhases phases = optimize_both(channels, rng);
    const double noise_watts = dbm_to_watts(cell_config.noise_dbm);
    const int r = channels.receive_dim();

    const CMatrix h_off = compose_effective(channels, PhaseConfig::off());
    const CMatrix h_rand =
        compose_effective(channels, to_phase_config(channels, phases.theta0));
    const CMatrix h_geo =
        compose_effective(channels, to_phase_config(channels, phases.geo.theta));
    const CMatrix h_har =
        compose_effective(channels, to_phase_config(channels, phases.har.theta));

    const ApproxOffsets off_offsets = approx_offsets(h_off, noise_watts);
    const ApproxOffsets rand_offsets = approx_offsets(h_rand, noise_watts);
    const ApproxOffsets opt_offsets = approx_offsets(h_geo, noise_watts);
    const ApproxOffsets har_opt_offsets = approx_offsets(h_har, noise_watts);

    const auto record = [&](RateMethod method, int sweeps = 0) {
      TrialRecord rec;
      rec.trial_index = trial;
      rec.method = to_string(method);
      rec.optimizer_sweeps = sweeps;
      rec.rates.reserve(powers_dbm.size());
      return rec;
    };
    TrialRecord dpc_opt = record(RateMethod::DpcOpt, phases.geo.trace.sweeps_run);
    TrialRecord zf_opt = record(RateMethod::ZfOpt, phases.har.trace.sweeps_run);
    TrialRecord dpc_rand = record(RateMethod::DpcRandom);
    TrialRecord zf_rand = record(RateMethod::ZfRandom);
    TrialRecord dpc_off = record(RateMethod::DpcOff);
    TrialRecord zf_off = record(RateMethod::ZfOff);
    TrialRecord ageo_opt = record(RateMethod::ApproxGeoOpt);
    TrialRecord ahar_opt = record(RateMethod::ApproxHarOpt);
    TrialRecord ageo_rand = record(RateMethod::ApproxGeoRandom);
    TrialRecord ahar_rand = record(RateMethod::ApproxHarRandom);
    TrialRecord ageo_off = record(RateMethod::ApproxGeoOff);
    TrialRecord ahar_off = record(RateMethod::ApproxHarOff);
    TrialRecord ahar_har = record(RateMethod::ApproxHarHarOpt);

    for (double dbm : powers_dbm) {
      const double power = dbm_to_watts(dbm);
      const PowerPoint pp{power, noise_watts};
      dpc_opt.rates.push_back(dpc_sum_capacity(h_geo, pp, kDpcTol, kDpcMaxIter));
      zf_opt.rates.push_back(zf_sum_rate(h_har, pp));
      dpc_rand.rates.push_back(dpc_sum_capacity(h_rand, pp, kDpcTol, kDpcMaxIter));
      zf_rand.rates.push_back(zf_sum_rate(h_rand, pp));
      dpc_off.rates.push_back(dpc_sum_capacity(h_off, pp, kDpcTol, kDpcMaxIter));
      zf_off.rates.push_back(zf_sum_rate(h_off, pp));
      ageo_opt.rates.push_back(high_snr_rate(power, r, opt_offsets.geo_bits));
      ahar_opt.rates.push_back(high_snr_rate(power, r, opt_offsets.har_bits));
      ageo_rand.rates.push_back(high_snr_rate(power, r, rand_offsets.geo_bits));
      ahar_rand.rates.push_back(high_snr_rate(power, r, rand_offsets.har_bits));
      ageo_off.rates.push_back(high_snr_rate(power, r, off_offsets.geo_bits));
      ahar_off.rates.push_back(high_snr_rate(power, r, off_offsets.har_bits));
      ahar_har.rates.push_back(high_snr_rate(power, r, har_opt_offsets.har_bits));
    }

    outcome.records = {std::move(dpc_opt),   std::move(zf_opt),    std::move(dpc_rand),
                       std::move(zf_rand),   std::move(dpc_off),   std::move(zf_off),
                       std::move(ageo_opt),  std::move(ahar_opt),  std::move(ageo_rand),
                       std::move(ahar_rand), std::move(ageo_off),  std::move(ahar_off)};
    if (include_har_har) outcome.records.push_back(std::move(ahar_har));
    outcome.ok = true;
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  return outcome;
}

void collect(std::vector<TrialOutcome>& slots, std::vector<TrialRecord>& records,
             std::vector<TrialFailure>& failures) {
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].ok) {
      for (auto& rec : slots[i].records) records.push_back(std::move(rec));
    } else {
      failures.push_back({static_cast<int>(i), slots[i].error});
    }
  }
}

}  // namespace

std::string to_string(EigMethod method) {
  switch (method) {
    case EigMethod::GeoMean: return "GeoMean";
    case EigMethod::HarMean: return "HarMean";
    case EigMethod::Random: return "Random";
    case EigMethod::Off: return "Off";
  }
  return "unknown";
}

std::string to_string(RateMethod method) {
  switch (method) {
    case RateMethod::DpcOpt: return "DPC-opt";
    case RateMethod::ZfOpt: return "ZF-opt";
    case RateMethod::DpcRandom: return "DPC-random";
    case RateMethod::ZfRandom: return "ZF-random";
    case RateMethod::DpcOff: return "DPC-off";
    case RateMethod::ZfOff: return "ZF-off";
    case RateMethod::ApproxGeoOpt: return "ApproxGeo-opt";
    case RateMethod::ApproxHarOpt: return "ApproxHar-opt";
    case RateMethod::ApproxGeoRandom: return "ApproxGeo-random";
    case RateMethod::ApproxHarRandom: return "ApproxHar-random";
    case RateMethod::ApproxGeoOff: return "ApproxGeo-off";
    case RateMethod::ApproxHarOff: return "ApproxHar-off";
    case RateMethod::ApproxHarHarOpt: return "ApproxHar-haropt";
  }
  return "unknown";
}

const std::vector<EigMethod>& eig_methods() {
  static const std::vector<EigMethod> methods = {EigMethod::GeoMean, EigMethod::HarMean,
                                                 EigMethod::Random, EigMethod::Off};
  return methods;
}

const std::vector<RateMethod>& rate_methods() {
  static const std::vector<RateMethod> methods = {
      RateMethod::DpcOpt,         RateMethod::ZfOpt,        RateMethod::DpcRandom,
      RateMethod::ZfRandom,       RateMethod::DpcOff,       RateMethod::ZfOff,
      RateMethod::ApproxGeoOpt,   RateMethod::ApproxHarOpt, RateMethod::ApproxGeoRandom,
      RateMethod::ApproxHarRandom, RateMethod::ApproxGeoOff, RateMethod::ApproxHarOff,
      RateMethod::ApproxHarHarOpt};
  return methods;
}

EigenvalueExperimentResult run_eigenvalue_experiment(const ScenarioConfig& config) {
  config.validate();
  if (config.fading.bs_ris.kind != FadingKind::KroneckerRank) {
    throw DomainError("eigenvalue experiment requires KroneckerRank feeder fading");
  }
  if (config.rank_grid.empty()) {
    throw DomainError("eigenvalue experiment requires a nonempty rank grid");
  }
  int min_ris = config.dimensions.n_ris_elements.front();
  for (int n : config.dimensions.n_ris_elements) min_ris = std::min(min_ris, n);
  for (int rank : config.rank_grid) {
    if (rank < 1 || rank > std::min(min_ris, config.dimensions.n_bs)) {
      throw DomainError("eigenvalue experiment: feeder rank out of range");
    }
  }

  EigenvalueExperimentResult result;
  result.config = config;
  const int n_threads = resolve_threads(config);

  // Cells share per-trial substreams: the direct and reflect channels are
  // drawn before any feeder-dependent randomness, so every rank sees the
  // same propagation environment and only the feeder structure changes.
  for (std::size_t cell_idx = 0; cell_idx < config.rank_grid.size(); ++cell_idx) {
    ScenarioConfig cell_config = config;
    cell_config.fading.bs_ris.rank = config.rank_grid[cell_idx];

    std::vector<TrialOutcome> slots(config.n_trials);
    parallel_trials(config.n_trials, n_threads, [&](int trial) {
      slots[trial] = eigenvalue_trial(cell_config, trial, trial);
    });

    EigenvalueCell cell;
    cell.rank = config.rank_grid[cell_idx];
    collect(slots, cell.records, cell.failures);
    result.cells.push_back(std::move(cell));
  }
  return result;
}

SnrSweepResult run_snr_sweep(const ScenarioConfig& config) {
  config.validate();
  if (config.power_grid_dbm.empty()) {
    throw DomainError("snr sweep requires a nonempty power grid");
  }

  SnrSweepResult result;
  result.config = config;
  std::vector<TrialOutcome> slots(config.n_trials);
  parallel_trials(config.n_trials, resolve_threads(config), [&](int trial) {
    slots[trial] = rate_trial(config, trial, trial, config.power_grid_dbm, false);
  });
  collect(slots, result.records, result.failures);
  return result;
}

ElementSweepResult run_element_sweep(const ScenarioConfig& config) {
  config.validate();
  if (config.ris_element_grid.empty()) {
    throw DomainError("element sweep requires a nonempty element grid");
  }
  if (config.dimensions.n_ris_elements.size() != 1) {
    throw DomainError("element sweep requires exactly one reflecting surface");
  }
  for (int n : config.ris_element_grid) {
    if (n < 1) throw DomainError("element sweep: element counts must be >= 1");
  }

  ElementSweepResult result;
  result.config = config;
  const std::vector<double> power = {config.element_sweep_power_dbm};
  const int n_threads = resolve_threads(config);

  // Cells share per-trial substreams; the direct channel is drawn before any
  // element-count-dependent randomness, so the Off curves are bit-identical
  // across the grid.
  for (std::size_t cell_idx = 0; cell_idx < config.ris_element_grid.size(); ++cell_idx) {
    ScenarioConfig cell_config = config;
    cell_config.dimensions.n_ris_elements = {config.ris_element_grid[cell_idx]};

    std::vector<TrialOutcome> slots(config.n_trials);
    parallel_trials(config.n_trials, n_threads, [&](int trial) {
      slots[trial] = rate_trial(cell_config, trial, trial, power, true);
    });

    ElementSweepCell cell;
    cell.n_ris = config.ris_element_grid[cell_idx];
    collect(slots, cell.records, cell.failures);
    result.cells.push_back(std::move(cell));
  }
  return result;
}

RVector mean_eigenvalues(const EigenvalueCell& cell, EigMethod method) {
  const std::string label = to_string(method);
  RVector sum;
  int count = 0;
  for (const auto& record : cell.records) {
    if (record.method != label) continue;
    if (sum.size() == 0) sum = RVector::Zero(record.eigenvalues.size());
    sum += record.eigenvalues;
    ++count;
  }
  if (count == 0) throw DomainError("mean_eigenvalues: no records for method " + label);
  return sum / static_cast<double>(count);
}

std::vector<double> per_trial_rates(const std::vector<TrialRecord>& records,
                                    RateMethod method, int x_index) {
  const std::string label = to_string(method);
  std::vector<double> out;
  for (const auto& record : records) {
    if (record.method != label) continue;
    out.push_back(record.rates.at(x_index));
  }
  return out;
}

MeanStderr rate_statistics(const std::vector<TrialRecord>& records,
                           RateMethod method, int x_index) {
  const std::vector<double> values = per_trial_rates(records, method, x_index);
  MeanStderr stats;
  stats.n = static_cast<int>(values.size());
  if (values.empty()) return stats;
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / values.size();
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
    stats.std_error = std::sqrt(ss / (values.size() - 1)) / std::sqrt(double(values.size()));
  }
  return stats;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// --- output ----------------------------------------------------------------

namespace {

ordered_json config_to_json(const ScenarioConfig& config) {
  ordered_json j;
  j["experiment"] = to_string(config.experiment);
  j["name"] = config.name;
  j["seed"] = config.seed;
  j["trials"] = config.n_trials;
  j["noise_dbm"] = config.noise_dbm;
  j["dimensions"] = {{"n_bs", config.dimensions.n_bs},
                     {"n_ms", config.dimensions.n_ms},
                     {"n_users", config.dimensions.n_users},
                     {"n_ris_elements", config.dimensions.n_ris_elements}};
  ordered_json ris = ordered_json::array();
  for (const auto& p : config.ris_positions) ris.push_back({p.x, p.y});
  j["geometry"] = {{"bs", {config.bs_position.x, config.bs_position.y}},
                   {"ris", ris},
                   {"user_disk_center",
                    {config.user_disk_center.x, config.user_disk_center.y}},
                   {"user_disk_radius", config.user_disk_radius}};
  const auto pathloss_json = [](const PathLossParams& p) {
    return ordered_json{{"alpha_db", p.alpha_db}, {"beta", p.beta}};
  };
  j["pathloss"] = {{"direct", pathloss_json(config.pathloss.direct)},
                   {"reflect", pathloss_json(config.pathloss.reflect)},
                   {"bs_ris", pathloss_json(config.pathloss.bs_ris)}};
  const auto fading_json = [](const FadingSpec& f) {
    ordered_json out;
    switch (f.kind) {
      case FadingKind::Rayleigh: out["kind"] = "rayleigh"; break;
      case FadingKind::Rician:
        out["kind"] = "rician";
        out["rician_factor_db"] = f.rician_factor_db;
        break;
      case FadingKind::KroneckerRank:
        out["kind"] = "kronecker_rank";
        out["rank"] = f.rank;
        break;
    }
    return out;
  };
  j["fading"] = {{"direct", fading_json(config.fading.direct)},
                 {"reflect", fading_json(config.fading.reflect)},
                 {"bs_ris", fading_json(config.fading.bs_ris)}};
  ordered_json extra_users = ordered_json::array();
  for (int user : config.extra_loss_users) extra_users.push_back(user + 1);
  j["extra_loss"] = {{"loss_db", config.extra_loss_db}, {"users", extra_users}};
  j["grid"] = {{"power_dbm", config.power_grid_dbm},
               {"ris_elements", config.ris_element_grid},
               {"ranks", config.rank_grid},
               {"element_sweep_power_dbm", config.element_sweep_power_dbm}};
  j["output_dir"] = config.output_dir;
  return j;
}

ordered_json failures_to_json(const std::vector<TrialFailure>& failures) {
  ordered_json list = ordered_json::array();
  for (const auto& f : failures) {
    list.push_back({{"trial", f.trial_index}, {"message", f.message}});
  }
  return list;
}

std::string write_metadata(const ScenarioConfig& config, ordered_json failures,
                           const std::string& dir) {
  ordered_json j;
  j["artifact"] = "riseig";
  j["version"] = kVersion;
  j["config"] = config_to_json(config);
  j["failures"] = std::move(failures);
  const std::string path = dir + "/" + config.name + "_metadata.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
  return path;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

std::vector<std::string> write_outputs(const EigenvalueExperimentResult& result,
                                       const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string csv_path = dir + "/" + result.config.name + "_eigenvalues.csv";
  std::ofstream csv = open_csv(csv_path);
  csv << "rank,method,eig_index,mean_value\n";
  for (const auto& cell : result.cells) {
    for (EigMethod method : eig_methods()) {
      const RVector means = mean_eigenvalues(cell, method);
      for (Eigen::Index i = 0; i < means.size(); ++i) {
        csv << cell.rank << "," << to_string(method) << "," << (i + 1) << ","
            << format_value(means(i)) << "\n";
      }
    }
    csv << cell.rank << ",Failures,0," << cell.failures.size() << "\n";
  }
  csv.close();

  ordered_json failures = ordered_json::array();
  for (const auto& cell : result.cells) {
    failures.push_back({{"rank", cell.rank}, {"trials", failures_to_json(cell.failures)}});
  }
  const std::string meta_path = write_metadata(result.config, std::move(failures), dir);
  return {csv_path, meta_path};
}

std::vector<std::string> write_outputs(const SnrSweepResult& result,
                                       const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string csv_path = dir + "/" + result.config.name + "_rates.csv";
  std::ofstream csv = open_csv(csv_path);
  csv << "x,method,mean_rate_bpcu,stderr\n";
  for (std::size_t i = 0; i < result.config.power_grid_dbm.size(); ++i) {
    for (RateMethod method : rate_methods()) {
      if (method == RateMethod::ApproxHarHarOpt) continue;
      const MeanStderr stats = rate_statistics(result.records, method, static_cast<int>(i));
      csv << format_value(result.config.power_grid_dbm[i]) << "," << to_string(method)
          << "," << format_value(stats.mean) << "," << format_value(stats.std_error) << "\n";
    }
  }
  csv << "all,Failures," << result.failures.size() << ",0\n";
  csv.close();

  const std::string meta_path =
      write_metadata(result.config, failures_to_json(result.failures), dir);
  return {csv_path, meta_path};
}

std::vector<std::string> write_outputs(const ElementSweepResult& result,
                                       const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string csv_path = dir + "/" + result.config.name + "_rates.csv";
  std::ofstream csv = open_csv(csv_path);
  csv << "x,method,mean_rate_bpcu,stderr\n";
  for (const auto& cell : result.cells) {
    for (RateMethod method : rate_methods()) {
      const MeanStderr stats = rate_statistics(cell.records, method, 0);
      csv << cell.n_ris << "," << to_string(method) << "," << format_value(stats.mean)
          << "," << format_value(stats.std_error) << "\n";
    }
    csv << cell.n_ris << ",Failures," << cell.failures.size() << ",0\n";
  }
  csv.close();

  ordered_json failures = ordered_json::array();
  for (const auto& cell : result.cells) {
    failures.push_back(
        {{"n_ris", cell.n_ris}, {"trials", failures_to_json(cell.failures)}});
  }
  const std::string meta_path = write_metadata(result.config, std::move(failures), dir);
  return {csv_path, meta_path};
}

}  // namespace riseig
