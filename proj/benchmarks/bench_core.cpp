#include <benchmark/benchmark.h>

#include "cvbell/bell.hpp"
#include "cvbell/homodyne.hpp"
#include "cvbell/lhv.hpp"
#include "cvbell/parallel.hpp"
#include "cvbell/quadrature.hpp"

namespace {

void BM_CircleStateCoeffs(benchmark::State& state) {
    const double r0 = static_cast<double>(state.range(0)) / 10.0;
    for (auto _ : state) benchmark::DoNotOptimize(cvbell::circle_state_coeffs(r0));
}
BENCHMARK(BM_CircleStateCoeffs)->Arg(11)->Arg(25)->Arg(50);

void BM_HalfRangeOverlaps(benchmark::State& state) {
    const int cutoff = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(cvbell::half_range_overlaps(cutoff));
}
BENCHMARK(BM_HalfRangeOverlaps)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_StandardAngleS(benchmark::State& state) {
    const auto coeffs = cvbell::circle_state_coeffs(static_cast<double>(state.range(0)) / 10.0);
    for (auto _ : state) benchmark::DoNotOptimize(cvbell::paper_angle_S(coeffs));
}
BENCHMARK(BM_StandardAngleS)->Arg(11)->Arg(25);

void BM_Sweep200(benchmark::State& state) {
    cvbell::SweepOptions opts;
    opts.r0_min = 0.0;
    opts.r0_max = 1.99;
    opts.step = 0.01;
    opts.jobs = 1;
    for (auto _ : state) benchmark::DoNotOptimize(cvbell::sweep_r0(opts));
}
BENCHMARK(BM_Sweep200)->Unit(benchmark::kMillisecond);

void BM_OptimizeAngles(benchmark::State& state) {
    const auto coeffs = cvbell::circle_state_coeffs(1.1);
    for (auto _ : state) benchmark::DoNotOptimize(cvbell::optimize_angles(coeffs));
}
BENCHMARK(BM_OptimizeAngles)->Unit(benchmark::kMillisecond);

void BM_LhvExactS(benchmark::State& state) {
    const auto coeffs = cvbell::circle_state_coeffs(1.1);
    for (auto _ : state) benchmark::DoNotOptimize(cvbell::lhv_exact_S(coeffs, cvbell::BellAngles::paper()));
}
BENCHMARK(BM_LhvExactS)->Unit(benchmark::kMicrosecond);

void BM_HusimiSampler(benchmark::State& state) {
    const auto coeffs = cvbell::circle_state_coeffs(1.1);
    cvbell::HusimiSampler sampler(coeffs);
    auto engine = cvbell::chunk_engine(7, 0);
    for (auto _ : state) benchmark::DoNotOptimize(sampler(engine));
}
BENCHMARK(BM_HusimiSampler);

void BM_FiniteES(benchmark::State& state) {
    const auto coeffs = cvbell::circle_state_coeffs(1.1);
    const auto lo = cvbell::LocalOscillator::with_default_cutoff(static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(cvbell::finite_E_S(coeffs, lo, cvbell::BellAngles::paper()));
}
BENCHMARK(BM_FiniteES)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
