#include "tabasco/oracle.hpp"
#include "tabasco/shrinkage.hpp"
#include "tabasco/simulate.hpp"
#include "tabasco/stap.hpp"

#include <benchmark/benchmark.h>

using namespace tabasco;

namespace {

RealSamples gaussian_fixture(int n, int p, std::uint64_t seed) {
  const RealMatrix sigma = build_cov({CovModel::Kind::AR1, p, 0.4, 0.0});
  auto rng = substream(seed, 0);
  SamplingSpec spec;
  spec.mean = SamplingSpec::MeanMode::RandomGaussian;
  return sample(spec, CholeskyFactor(sigma), n, rng);
}

void BM_BandingFamily(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(make_family(TemplateKind::Banding, p, default_bandwidths(p)));
}
BENCHMARK(BM_BandingFamily)->Arg(100)->Arg(250);

void BM_Scm(benchmark::State& state) {
  const auto data = gaussian_fixture(static_cast<int>(state.range(0)), 100, 1);
  for (auto _ : state) benchmark::DoNotOptimize(scm(data));
}
BENCHMARK(BM_Scm)->Arg(50)->Arg(200);

void BM_Sscm(benchmark::State& state) {
  const auto data = gaussian_fixture(static_cast<int>(state.range(0)), 100, 2);
  for (auto _ : state) benchmark::DoNotOptimize(sscm(data));
}
BENCHMARK(BM_Sscm)->Arg(50)->Arg(200);

void BM_TemplateStats(benchmark::State& state) {
  const int p = 100;
  const auto data = gaussian_fixture(100, p, 3);
  const auto s = scm(data);
  const auto w = banding_template(p, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(frob_norm_sq(hadamard(w.W, s.S)));
    benchmark::DoNotOptimize(diag_quadratic(w.W, RealVector(s.S.diagonal())));
  }
}
BENCHMARK(BM_TemplateStats);

void BM_TabascoPipeline(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const auto data = gaussian_fixture(100, p, 4);
  const auto family = make_family(TemplateKind::Banding, p, default_bandwidths(p));
  for (auto _ : state) benchmark::DoNotOptimize(tabasco_estimate(data, family));
}
BENCHMARK(BM_TabascoPipeline)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_OracleBeta(benchmark::State& state) {
  const RealMatrix sigma = build_cov({CovModel::Kind::AR1, 100, 0.4, 0.0});
  OracleInputs<double> in{sigma, 0.0, 50, DataRegime::RealUnknownMean};
  const auto w = banding_template(100, 3);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_beta(in, w));
}
BENCHMARK(BM_OracleBeta);

void BM_AceMap(benchmark::State& state) {
  RadarConfig cfg;
  cfg.sensors = 2;
  cfg.pulses = 8;
  cfg.spacing = cfg.wavelength() / 2.0;
  cfg.platform_speed = cfg.spacing * cfg.prf / 2.0;
  const auto data = synth_clutter(cfg, 40, 10, 5);
  const auto est = rscm_special_case(data);
  const auto grid = make_detection_grid(cfg, 33, 33, 1.2);
  const ComplexVector x0 = synth_clutter(cfg, 1, 10, 6).data.row(0).transpose();
  for (auto _ : state)
    benchmark::DoNotOptimize(detection_map(cfg, est.Sigma_hat, grid, x0));
}
BENCHMARK(BM_AceMap)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
