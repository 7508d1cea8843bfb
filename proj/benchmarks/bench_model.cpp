// Hot-path micro benchmarks: sixth-order moment accumulation over a large
// alphabet, the frequency-domain link kernel, and a small 3D Monte-Carlo
// integral (the cheapest member of the production integral set).

#include <benchmark/benchmark.h>

#include <cstdint>
#include <numbers>

#include "nli4d/constellation.hpp"
#include "nli4d/formats.hpp"
#include "nli4d/integrator.hpp"
#include "nli4d/link.hpp"

namespace {

nli4d::LinkSpec bench_link() {
    nli4d::LinkSpec link;
    link.fiber.gamma_per_w_m = 1.3e-3;
    link.fiber.beta2_s2_m = nli4d::units::beta2_from_dispersion(16.5, 1550.0);
    link.fiber.alpha_db_km = 0.2;
    link.span_length_m = 100e3;
    link.num_spans = 10;
    return link;
}

void BM_moments_pm64qam(benchmark::State& state) {
    const nli4d::Constellation4D c = nli4d::formats::pm_64qam();  // 4096 points
    for (auto _ : state) {
        benchmark::DoNotOptimize(nli4d::moments(c));
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(c.size()));
}

void BM_link_kernel(benchmark::State& state) {
    const nli4d::LinkSpec link = bench_link();
    const double T = 1.0 / 32e9;
    const double wb = std::numbers::pi / T;
    // A fixed sweep through the band, including near-resonant phase values.
    for (auto _ : state) {
        nli4d::cplx acc = 0;
        for (int i = 0; i < 64; ++i) {
            const double w1 = wb * (2.0 * i / 63.0 - 1.0);
            acc += nli4d::rho_s(w1, 0.37 * wb, -0.81 * wb, T, link);
        }
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * 64);
}

void BM_eval_Z1_50k(benchmark::State& state) {
    const nli4d::LinkSpec link = bench_link();
    for (auto _ : state) {
        benchmark::DoNotOptimize(nli4d::eval_Z1(link, 1.0 / 32e9, 50'000, 1));
    }
    state.SetItemsProcessed(state.iterations() * 50'000);
}

BENCHMARK(BM_moments_pm64qam)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_link_kernel);
BENCHMARK(BM_eval_Z1_50k)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
