// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Each criterion prints one PASS/FAIL line; the process
// exits nonzero if any criterion fails. Thresholds and trial counts are fixed
// here, not calibrated at run time.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "riseig/channel_model.hpp"
#include "riseig/experiment.hpp"
#include "riseig/gram_decomposition.hpp"
#include "riseig/phase_optimizer.hpp"
#include "riseig/rate_evaluation.hpp"
#include "riseig/scenario.hpp"
#include "riseig/spectral_metrics.hpp"
#include "riseig/waterfilling.hpp"

using namespace riseig;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& message) {
    if (!condition && ok) {
      ok = false;
      detail = message;
    }
  }
};

std::string format_number(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6g", v);
  return buffer;
}

// --- 1: decomposition identity ----------------------------------------------

Check criterion_decomposition_identity() {
  Check check;
  Rng rng(101);
  double worst = 0.0;
  for (int instance = 0; instance < 200; ++instance) {
    const int r = 2 + static_cast<int>(rng.next_u64() % 5);          // 2..6
    const int n_bs = r + static_cast<int>(rng.next_u64() % (17 - r));  // r..16
    const int n_ris = 1 + static_cast<int>(rng.next_u64() % 32);     // 1..32
    const int max_rank = std::min(n_ris, n_bs);
    const int rank = 1 + static_cast<int>(rng.next_u64() % max_rank);
    const ChannelSet channels =
        oracles::rank_limited_channels(rng, r, n_bs, n_ris, rank);
    const GramDecomposition decomp = decompose(channels);

    for (int draw = 0; draw < 10; ++draw) {
      const CVector theta = random_phases(rng, n_ris);
      const CMatrix h = compose_effective(channels, PhaseConfig::single(theta));
      const CMatrix gram = h * h.adjoint();
      const CMatrix split = decomp.c_matrix + assemble_q(decomp, theta);
      worst = std::max(worst, (gram - split).norm() / gram.norm());
    }
  }
  check.require(worst < 1e-10,
                "max relative Frobenius error " + format_number(worst));
  if (check.ok) check.detail = "max relative error " + format_number(worst);
  return check;
}

// --- 2: interlacing ----------------------------------------------------------

Check criterion_interlacing() {
  Check check;
  Rng rng(202);
  for (int instance = 0; instance < 500 && check.ok; ++instance) {
    const int r = 2 + static_cast<int>(rng.next_u64() % 5);
    const int n_bs = r + static_cast<int>(rng.next_u64() % 5);
    const int n_ris = 1 + static_cast<int>(rng.next_u64() % 16);
    const ChannelSet channels = oracles::rank_limited_channels(rng, r, n_bs, n_ris, 1);
    const GramDecomposition decomp = decompose(channels);
    const RVector phi = oracles::psd_spectrum(decomp.c_matrix);

    const RVector lambda_direct =
        gram_spectrum(compose_effective(channels, PhaseConfig::off())).values;

    OptimizerConfig config;
    config.max_sweeps = 5;
    Rng opt_rng(5000 + instance);
    const CVector theta_opt = optimize_geo_mean(channels, config, opt_rng).theta;
    const CVector theta_rand = random_phases(rng, n_ris);

    for (const CVector* theta : {&theta_rand, &theta_opt}) {
      const RVector lambda =
          gram_spectrum(compose_effective(channels, PhaseConfig::single(*theta)))
              .values;
      const double slack = 1e-9 * lambda(0);
      for (int i = 0; i < r; ++i) {
        check.require(lambda(i) >= phi(i) - slack,
                      "lower interlacing violated at instance " +
                          std::to_string(instance));
        if (i >= 1) {
          check.require(lambda(i) <= phi(i - 1) + slack,
                        "upper interlacing violated at instance " +
                            std::to_string(instance));
          check.require(lambda(i) <= lambda_direct(i - 1) * (1.0 + 1e-6),
                        "direct-channel ceiling violated at instance " +
                            std::to_string(instance));
        }
      }
    }
    // The direct spectrum interlaces phi as well.
    const double slack_d = 1e-9 * lambda_direct(0);
    for (int i = 0; i < r; ++i) {
      check.require(lambda_direct(i) >= phi(i) - slack_d,
                    "direct lower interlacing violated");
      if (i >= 1) {
        check.require(lambda_direct(i) <= phi(i - 1) + slack_d,
                      "direct upper interlacing violated");
      }
    }
  }
  if (check.ok) check.detail = "500 rank-one instances, random + optimized phases";
  return check;
}

// --- 3: offset sandwich ------------------------------------------------------

Check criterion_offset_sandwich() {
  Check check;
  Rng rng(303);
  for (int instance = 0; instance < 1000 && check.ok; ++instance) {
    const int n_ms = (instance % 3 == 0) ? 2 : 1;
    const int n_users = 2 + static_cast<int>(rng.next_u64() % (n_ms == 2 ? 2 : 5));
    const int r = n_ms * n_users;
    const CMatrix h = gen_rayleigh(rng, r, r + 2 + static_cast<int>(rng.next_u64() % 6), 1.0);
    const OffsetReport report =
        make_offset_report(h, UserPartition::contiguous(n_users, n_ms));
    const double lower = r * std::log2(report.har_mean);
    const double upper = r * std::log2(report.geo_mean);
    check.require(lower <= report.lin_offset_bits + 1e-9, "lower sandwich violated");
    check.require(report.lin_offset_bits <= report.dpc_offset_bits + 1e-9,
                  "linear offset exceeds DPC offset");
    check.require(std::abs(report.dpc_offset_bits - upper) <= 1e-9,
                  "DPC offset differs from r*log2(geometric mean)");
  }

  // Orthogonal user row spaces give exact equality.
  for (int instance = 0; instance < 50 && check.ok; ++instance) {
    const int n_ms = (instance % 2 == 0) ? 1 : 2;
    const int n_users = 3;
    const int n_bs = 8;
    CMatrix g(n_bs, n_bs);
    for (int i = 0; i < n_bs; ++i) {
      for (int j = 0; j < n_bs; ++j) g(i, j) = rng.complex_normal();
    }
    const CMatrix q = Eigen::HouseholderQR<CMatrix>(g).householderQ();
    CMatrix h(n_users * n_ms, n_bs);
    for (int k = 0; k < n_users; ++k) {
      CMatrix mix(n_ms, n_ms);
      for (int i = 0; i < n_ms; ++i) {
        for (int j = 0; j < n_ms; ++j) mix(i, j) = rng.complex_normal();
      }
      h.middleRows(k * n_ms, n_ms) = mix * q.middleCols(k * n_ms, n_ms).adjoint();
    }
    const double gap =
        dpc_offset(h) - lin_offset(h, UserPartition::contiguous(n_users, n_ms));
    check.require(std::abs(gap) < 1e-9,
                  "block-diagonal equality violated: gap " + format_number(gap));
  }
  if (check.ok) check.detail = "1000 random + 50 block-diagonal channels";
  return check;
}

// --- 4: rank-constrained waterfilling oracle ---------------------------------

Check criterion_waterfilling_oracle() {
  Check check;
  Rng rng(404);
  for (int instance = 0; instance < 50 && check.ok; ++instance) {
    RVector spectrum(3);
    spectrum << rng.uniform(2.5, 4.0), rng.uniform(1.2, 2.4), rng.uniform(0.3, 1.1);
    const CMatrix c = oracles::psd_with_spectrum(rng, spectrum);
    const double budget = rng.uniform(0.5, 4.0);
    const int rank_limit = 1 + (instance % 2);
    const RankConstrainedFill fill = rank_constrained_waterfill(c, budget, rank_limit);

    const double det_star = (c + fill.q_star).determinant().real();
    const double trinv_star = (c + fill.q_star).inverse().trace().real();

    for (int draw = 0; draw < 10000; ++draw) {
      const CMatrix q = oracles::random_feasible_q(rng, 3, rank_limit, budget);
      check.require(det_star >= (c + q).determinant().real() - 1e-6,
                    "random competitor beats the fill in det");
      check.require(trinv_star <= (c + q).inverse().trace().real() + 1e-6,
                    "random competitor beats the fill in trace-inverse");
    }
    const oracles::PgaResult pga = oracles::pga_best(rng, c, budget, rank_limit, 10, 400);
    check.require(det_star >= pga.det - 1e-6, "gradient ascent beats the fill in det");
    check.require(trinv_star <= (c + pga.q).inverse().trace().real() + 1e-6,
                  "gradient ascent beats the fill in trace-inverse");

    if (rank_limit == 1) {
      Eigen::SelfAdjointEigenSolver<CMatrix> solver(c);
      const CVector w_min = solver.eigenvectors().col(0);
      const double err = (fill.q_star - budget * w_min * w_min.adjoint()).norm();
      check.require(err <= 1e-10,
                    "rank-one fill differs from the minimum-eigenvector beam by " +
                        format_number(err));
    }
  }
  if (check.ok) check.detail = "50 instances vs 10^4 draws + 10 PGA runs each";
  return check;
}

// --- 5: optimizer correctness ------------------------------------------------

Check criterion_optimizer() {
  Check check;
  Rng rng(505);

  const auto logdet_bits = [](const CMatrix& h) { return dpc_offset(h); };
  const auto trace_inverse = [](const CMatrix& h) {
    return (h * h.adjoint()).inverse().trace().real();
  };
  const auto assert_monotone = [&](const std::vector<double>& trace, bool increasing) {
    for (std::size_t i = 1; i < trace.size(); ++i) {
      const double tol = 1e-9 * std::max(1.0, std::abs(trace[i - 1]));
      if (increasing) {
        check.require(trace[i] >= trace[i - 1] - tol, "geo trace decreased");
      } else {
        check.require(trace[i] <= trace[i - 1] + tol, "har trace increased");
      }
    }
  };

  // Monotone traces on larger random instances.
  for (int instance = 0; instance < 20 && check.ok; ++instance) {
    const int r = 2 + static_cast<int>(rng.next_u64() % 5);
    const int n_bs = r + static_cast<int>(rng.next_u64() % 6);
    const int n_ris = 4 + static_cast<int>(rng.next_u64() % 29);
    const ChannelSet channels = oracles::random_channels(rng, r, n_bs, n_ris);
    Rng geo_rng(1000 + instance);
    Rng har_rng(2000 + instance);
    assert_monotone(
        optimize_geo_mean(channels, OptimizerConfig{}, geo_rng).trace.objective_per_sweep,
        true);
    assert_monotone(
        optimize_har_mean(channels, OptimizerConfig{}, har_rng).trace.objective_per_sweep,
        false);
  }

  // Grid-oracle match with 8 restarts at one or two elements.
  for (int instance = 0; instance < 50 && check.ok; ++instance) {
    const int r = 2 + static_cast<int>(rng.next_u64() % 2);
    const int n_ris = 1 + (instance % 2);
    const ChannelSet channels = oracles::random_channels(rng, r, r + 2, n_ris);
    const bool geo = instance % 2 == 0;

    double best = geo ? -1e300 : 1e300;
    for (int restart = 0; restart < 8; ++restart) {
      Rng opt_rng(3000 + 10 * instance + restart);
      const OptimizeResult result =
          geo ? optimize_geo_mean(channels, OptimizerConfig{}, opt_rng)
              : optimize_har_mean(channels, OptimizerConfig{}, opt_rng);
      assert_monotone(result.trace.objective_per_sweep, geo);
      best = geo ? std::max(best, result.trace.objective_per_sweep.back())
                 : std::min(best, result.trace.objective_per_sweep.back());
    }
    if (geo) {
      const oracles::GridResult grid =
          oracles::grid_search_phases(channels, logdet_bits, true, 64);
      check.require(best >= grid.objective - 1e-3,
                    "geo coordinate ascent missed the grid optimum by " +
                        format_number(grid.objective - best));
    } else {
      const oracles::GridResult grid =
          oracles::grid_search_phases(channels, trace_inverse, false, 64);
      check.require(best <= grid.objective + 1e-3,
                    "har coordinate descent missed the grid optimum by " +
                        format_number(best - grid.objective));
    }
  }
  if (check.ok) check.detail = "monotone traces + 50 grid-oracle instances";
  return check;
}

// --- 6: high-SNR asymptote ---------------------------------------------------

Check criterion_high_snr_asymptote() {
  Check check;
  Rng rng(606);
  for (int instance = 0; instance < 50 && check.ok; ++instance) {
    const int r = 2 + static_cast<int>(rng.next_u64() % 5);
    const int n_bs = r + 2 + static_cast<int>(rng.next_u64() % 5);
    const CMatrix h = gen_rayleigh(rng, r, n_bs, 1.0);
    const double dpc_off = dpc_offset(h);
    const double lin_off = lin_offset(h, UserPartition::contiguous(r, 1));

    const auto dpc_err = [&](double p) {
      return std::abs(dpc_sum_capacity(h, {p, 1.0}, 1e-13, 20000) -
                      high_snr_rate(p, r, dpc_off));
    };
    const auto zf_err = [&](double p) {
      return std::abs(zf_sum_rate(h, {p, 1.0}) - high_snr_rate(p, r, lin_off));
    };

    const double dpc8 = dpc_err(1e8);
    const double dpc10 = dpc_err(1e10);
    const double zf8 = zf_err(1e8);
    const double zf10 = zf_err(1e10);
    check.require(dpc10 < 0.05, "DPC error at 1e10 is " + format_number(dpc10));
    check.require(dpc10 < dpc8, "DPC error did not shrink from 1e8 to 1e10");
    check.require(zf10 < 0.05, "ZF error at 1e10 is " + format_number(zf10));
    check.require(zf10 < zf8, "ZF error did not shrink from 1e8 to 1e10");
  }
  if (check.ok) check.detail = "50 channels at P/sigma^2 = 1e8 and 1e10";
  return check;
}

// --- 7: figure-1 trends ------------------------------------------------------

struct TrialSpectra {
  RVector geo;
  RVector off;
};

std::vector<TrialSpectra> paired_spectra(const EigenvalueCell& cell) {
  std::map<int, TrialSpectra> by_trial;
  for (const auto& record : cell.records) {
    if (record.method == to_string(EigMethod::GeoMean)) {
      by_trial[record.trial_index].geo = record.eigenvalues;
    } else if (record.method == to_string(EigMethod::Off)) {
      by_trial[record.trial_index].off = record.eigenvalues;
    }
  }
  std::vector<TrialSpectra> out;
  for (auto& [trial, spectra] : by_trial) out.push_back(std::move(spectra));
  return out;
}

Check criterion_figure1() {
  Check check;
  constexpr std::uint64_t kSeed = 20250811;

  const auto run = [&](const char* name) {
    ScenarioConfig config = preset(name);
    config.n_trials = 100;
    config.seed = kSeed;
    return run_eigenvalue_experiment(config);
  };

  // fig1a: a rank-one feeder lifts exactly one of the three weak eigenvalues
  // by at least 10 dB while the whole spectrum honors the interlacing ceiling.
  {
    const EigenvalueExperimentResult result = run("fig1a");
    const auto spectra = paired_spectra(result.cells.front());
    check.require(spectra.size() >= 90, "fig1a: too many failed trials");
    int good = 0;
    for (const auto& t : spectra) {
      const int r = static_cast<int>(t.off.size());
      int improved = 0;
      for (int i = r - 3; i < r; ++i) {
        if (t.geo(i) >= 10.0 * t.off(i)) ++improved;
      }
      bool ceiling = true;
      for (int k = 1; k < r; ++k) {
        if (t.geo(k) > t.off(k - 1) * (1.0 + 1e-6)) ceiling = false;
      }
      if (improved == 1 && ceiling) ++good;
    }
    const double fraction = static_cast<double>(good) / spectra.size();
    check.require(fraction >= 0.90,
                  "fig1a: exactly-one-improvement fraction " + format_number(fraction));
    if (check.ok) check.detail = "fig1a " + format_number(fraction);
  }

  // fig1c: a full-rank feeder lifts all three weak eigenvalues by 10 dB.
  if (check.ok) {
    const EigenvalueExperimentResult result = run("fig1c");
    const auto spectra = paired_spectra(result.cells.front());
    check.require(spectra.size() >= 90, "fig1c: too many failed trials");
    int good = 0;
    for (const auto& t : spectra) {
      const int r = static_cast<int>(t.off.size());
      int improved = 0;
      for (int i = r - 3; i < r; ++i) {
        if (t.geo(i) >= 10.0 * t.off(i)) ++improved;
      }
      if (improved == 3) ++good;
    }
    const double fraction = static_cast<double>(good) / spectra.size();
    check.require(fraction >= 0.80,
                  "fig1c: all-three-improved fraction " + format_number(fraction));
    if (check.ok) check.detail += ", fig1c " + format_number(fraction);
  }

  // fig1d: a strong reflect link conditions the channel; the post-optimization
  // spread collapses by at least 10x.
  if (check.ok) {
    const EigenvalueExperimentResult result = run("fig1d");
    const auto spectra = paired_spectra(result.cells.front());
    check.require(spectra.size() >= 90, "fig1d: too many failed trials");
    std::vector<double> spread_geo, spread_off;
    for (const auto& t : spectra) {
      const int r = static_cast<int>(t.off.size());
      spread_geo.push_back(t.geo(0) / t.geo(r - 1));
      spread_off.push_back(t.off(0) / t.off(r - 1));
    }
    const double ratio = median(spread_off) / median(spread_geo);
    check.require(ratio >= 10.0, "fig1d: spread shrink factor " + format_number(ratio));
    if (check.ok) check.detail += ", fig1d shrink " + format_number(ratio);
  }
  return check;
}

// --- 8: figure-4 trend -------------------------------------------------------

Check criterion_figure4() {
  Check check;
  constexpr std::uint64_t kSeed = 20250812;

  const auto gaps = [&](const char* name) {
    ScenarioConfig config = preset(name);
    config.n_trials = 100;
    config.seed = kSeed;
    config.ris_element_grid = {16, 64, 256};
    const ElementSweepResult result = run_element_sweep(config);
    std::map<int, double> opt_gap_median;
    std::map<int, double> off_gap_median;
    for (const auto& cell : result.cells) {
      const auto dpc_opt = per_trial_rates(cell.records, RateMethod::DpcOpt, 0);
      const auto zf_opt = per_trial_rates(cell.records, RateMethod::ZfOpt, 0);
      const auto dpc_off = per_trial_rates(cell.records, RateMethod::DpcOff, 0);
      const auto zf_off = per_trial_rates(cell.records, RateMethod::ZfOff, 0);
      std::vector<double> opt_gaps, off_gaps;
      for (std::size_t i = 0; i < dpc_opt.size(); ++i) {
        opt_gaps.push_back(dpc_opt[i] - zf_opt[i]);
        off_gaps.push_back(dpc_off[i] - zf_off[i]);
      }
      opt_gap_median[cell.n_ris] = median(opt_gaps);
      off_gap_median[cell.n_ris] = median(off_gaps);
    }
    return std::make_pair(opt_gap_median, off_gap_median);
  };

  const auto [ray_gap, ray_off] = gaps("fig4a");
  check.require(ray_gap.at(16) > ray_gap.at(64) && ray_gap.at(64) > ray_gap.at(256),
                "rayleigh gap not monotone: " + format_number(ray_gap.at(16)) + ", " +
                    format_number(ray_gap.at(64)) + ", " +
                    format_number(ray_gap.at(256)));
  check.require(ray_gap.at(256) < 0.25 * ray_off.at(256),
                "rayleigh 256-element gap " + format_number(ray_gap.at(256)) +
                    " vs off gap " + format_number(ray_off.at(256)));

  const auto [ric_gap, ric_off] = gaps("fig4b");
  (void)ric_off;
  check.require(ric_gap.at(256) >= 3.0 * ray_gap.at(256),
                "rician/rayleigh gap ratio " +
                    format_number(ric_gap.at(256) / ray_gap.at(256)));

  if (check.ok) {
    check.detail = "rayleigh gaps " + format_number(ray_gap.at(16)) + " > " +
                   format_number(ray_gap.at(64)) + " > " +
                   format_number(ray_gap.at(256)) + "; rician 256 " +
                   format_number(ric_gap.at(256));
  }
  return check;
}

// --- 9: determinism ----------------------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Check criterion_determinism() {
  Check check;
  const auto base =
      std::filesystem::temp_directory_path() / "riseig_acceptance_determinism";
  std::filesystem::remove_all(base);

  ScenarioConfig eig = preset("fig1a");
  eig.n_trials = 5;
  eig.seed = 3;
  std::vector<std::string> eig_csvs;
  for (int threads : {1, 2, 4}) {
    eig.n_threads = threads;
    const auto result = run_eigenvalue_experiment(eig);
    const std::string dir = (base / ("eig_t" + std::to_string(threads))).string();
    write_outputs(result, dir);
    eig_csvs.push_back(slurp(dir + "/fig1a_eigenvalues.csv"));
  }
  check.require(!eig_csvs[0].empty(), "empty eigenvalue CSV");
  check.require(eig_csvs[0] == eig_csvs[1] && eig_csvs[1] == eig_csvs[2],
                "eigenvalue CSVs differ across thread counts");

  ScenarioConfig sweep = preset("fig4a");
  sweep.n_trials = 3;
  sweep.seed = 4;
  sweep.ris_element_grid = {4, 8};
  std::vector<std::string> sweep_csvs;
  for (int threads : {1, 4}) {
    sweep.n_threads = threads;
    const auto result = run_element_sweep(sweep);
    const std::string dir = (base / ("el_t" + std::to_string(threads))).string();
    write_outputs(result, dir);
    sweep_csvs.push_back(slurp(dir + "/fig4a_rates.csv"));
  }
  check.require(!sweep_csvs[0].empty(), "empty rates CSV");
  check.require(sweep_csvs[0] == sweep_csvs[1],
                "rate CSVs differ across thread counts");

  // Rerunning with the same configuration reproduces the bytes as well.
  eig.n_threads = 2;
  const auto rerun = run_eigenvalue_experiment(eig);
  const std::string dir = (base / "eig_rerun").string();
  write_outputs(rerun, dir);
  check.require(slurp(dir + "/fig1a_eigenvalues.csv") == eig_csvs[0],
                "rerun produced different bytes");

  if (check.ok) check.detail = "byte-identical CSVs for 1/2/4 threads and reruns";
  return check;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria = {
      {"decomposition identity", criterion_decomposition_identity},
      {"rank-one interlacing", criterion_interlacing},
      {"offset sandwich", criterion_offset_sandwich},
      {"rank-constrained waterfilling oracle", criterion_waterfilling_oracle},
      {"optimizer monotonicity and grid oracle", criterion_optimizer},
      {"high-SNR asymptote", criterion_high_snr_asymptote},
      {"figure-1 eigenvalue trends", criterion_figure1},
      {"figure-4 gap trend", criterion_figure4},
      {"determinism across thread counts", criterion_determinism},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Check check;
    try {
      check = criteria[i].run();
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%zu/9] %-42s %s (%.1f s)%s%s\n", i + 1, criteria[i].name,
                check.ok ? "PASS" : "FAIL", seconds, check.detail.empty() ? "" : " -- ",
                check.detail.c_str());
    std::fflush(stdout);
    if (!check.ok) ++failed;
  }

  if (failed == 0) {
    std::printf("ACCEPTANCE: 9/9 passed\n");
    return 0;
  }
  std::printf("ACCEPTANCE: %d criterion(s) failed\n", failed);
  return 1;
}
