// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "riseig/channel_model.hpp"
#include "riseig/gram_decomposition.hpp"
#include "riseig/phase_optimizer.hpp"
#include "riseig/rate_evaluation.hpp"
#include "riseig/rng.hpp"
#include "riseig/waterfilling.hpp"

namespace {

using namespace riseig;

ChannelSet unit_scale_channels(Rng& rng, int r, int n_bs, int n_ris) {
  ChannelSet channels;
  channels.h_direct = gen_rayleigh(rng, r, n_bs, 1.0);
  channels.h_reflect = {gen_rayleigh(rng, r, n_ris, 1.0)};
  channels.h_bs_ris = {gen_rayleigh(rng, n_ris, n_bs, 1.0)};
  return channels;
}

void BM_ComposeEffective(benchmark::State& state) {
  Rng rng(11);
  const int n_ris = static_cast<int>(state.range(0));
  const ChannelSet channels = unit_scale_channels(rng, 6, 16, n_ris);
  const PhaseConfig phases = PhaseConfig::single(random_phases(rng, n_ris));
  for (auto _ : state) {
    benchmark::DoNotOptimize(compose_effective(channels, phases));
  }
}
BENCHMARK(BM_ComposeEffective)->Arg(16)->Arg(64)->Arg(256);

void BM_Decompose(benchmark::State& state) {
  Rng rng(12);
  const int n_ris = static_cast<int>(state.range(0));
  const ChannelSet channels = unit_scale_channels(rng, 6, 16, n_ris);
  for (auto _ : state) {
    benchmark::DoNotOptimize(decompose(channels));
  }
}
BENCHMARK(BM_Decompose)->Arg(16)->Arg(64)->Arg(256);

void BM_GeoMeanSweep(benchmark::State& state) {
  Rng rng(13);
  const int n_ris = static_cast<int>(state.range(0));
  const ChannelSet channels = unit_scale_channels(rng, 6, 16, n_ris);
  const CVector theta0 = random_phases(rng, n_ris);
  OptimizerConfig config;
  config.max_sweeps = 1;
  config.init = PhaseInit::Given;
  config.initial_phases = theta0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize_geo_mean(channels, config, rng));
  }
}
BENCHMARK(BM_GeoMeanSweep)->Arg(16)->Arg(64)->Arg(256);

void BM_HarMeanSweep(benchmark::State& state) {
  Rng rng(14);
  const int n_ris = static_cast<int>(state.range(0));
  const ChannelSet channels = unit_scale_channels(rng, 6, 16, n_ris);
  const CVector theta0 = random_phases(rng, n_ris);
  OptimizerConfig config;
  config.max_sweeps = 1;
  config.init = PhaseInit::Given;
  config.initial_phases = theta0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize_har_mean(channels, config, rng));
  }
}
BENCHMARK(BM_HarMeanSweep)->Arg(16)->Arg(64)->Arg(256);

void BM_DpcSumCapacity(benchmark::State& state) {
  Rng rng(15);
  CMatrix h = gen_rayleigh(rng, 6, 16, 1.0);
  const PowerPoint pp{1e4, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_dpc_sum_capacity(h, pp, 1e-9, 2000));
  }
}
BENCHMARK(BM_DpcSumCapacity);

void BM_RankConstrainedWaterfill(benchmark::State& state) {
  Rng rng(16);
  CMatrix a = gen_rayleigh(rng, 6, 6, 1.0);
  const CMatrix c = a * a.adjoint();
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank_constrained_waterfill(c, 4.0, 3));
  }
}
BENCHMARK(BM_RankConstrainedWaterfill);

}  // namespace
