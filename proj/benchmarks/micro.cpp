// Microbenchmarks for the per-frame and per-stack kernels that dominate the
// reconstruction pipelines.

#include <benchmark/benchmark.h>

#include <random>

#include "ffsrm/esi.hpp"
#include "ffsrm/hawk.hpp"
#include "ffsrm/image.hpp"
#include "ffsrm/musical.hpp"
#include "ffsrm/optical_config.hpp"
#include "ffsrm/psf.hpp"
#include "ffsrm/sacd.hpp"
#include "ffsrm/sofi.hpp"
#include "ffsrm/srrf.hpp"

namespace {

using namespace ffsrm;

ImageStack random_stack(int frames, int side, uint64_t seed = 7) {
    ImageStack stack(frames, side, side, 80.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 100.0);
    for (double& v : stack.data) v = dist(rng);
    return stack;
}

void BM_TemporalCumulant(benchmark::State& state) {
    const auto stack = random_stack(static_cast<int>(state.range(0)), 64);
    const int order = static_cast<int>(state.range(1));
    for (auto _ : state) {
        auto img = sofi::temporal_cumulant(stack, order, sofi::LagMode::DistinctFrames);
        benchmark::DoNotOptimize(img.data.data());
    }
}
BENCHMARK(BM_TemporalCumulant)->Args({200, 2})->Args({200, 4})->Args({1000, 2});

void BM_RadialityMap(benchmark::State& state) {
    const auto stack = random_stack(1, static_cast<int>(state.range(0)));
    const Image frame = stack.frame_image(0);
    srrf::SrrfParams params;
    params.magnification = static_cast<int>(state.range(1));
    for (auto _ : state) {
        auto img = srrf::radiality_map(frame, params);
        benchmark::DoNotOptimize(img.data.data());
    }
}
BENCHMARK(BM_RadialityMap)->Args({32, 2})->Args({32, 5})->Args({64, 2});

void BM_WindowSvd(benchmark::State& state) {
    const auto stack = random_stack(static_cast<int>(state.range(0)), 16);
    for (auto _ : state) {
        auto svd = musical::window_svd(stack, 0, 0, 7);
        benchmark::DoNotOptimize(svd.singular_values.data());
    }
}
BENCHMARK(BM_WindowSvd)->Arg(100)->Arg(500);

void BM_FourierInterpolate(benchmark::State& state) {
    const auto stack = random_stack(1, static_cast<int>(state.range(0)));
    const Image frame = stack.frame_image(0);
    const int mag = static_cast<int>(state.range(1));
    for (auto _ : state) {
        auto img = sacd::fourier_interpolate(frame, mag);
        benchmark::DoNotOptimize(img.data.data());
    }
}
BENCHMARK(BM_FourierInterpolate)->Args({64, 2})->Args({64, 8});

void BM_EsiReconstruct(benchmark::State& state) {
    const auto stack = random_stack(static_cast<int>(state.range(0)), 32);
    esi::EsiParams params;
    for (auto _ : state) {
        auto results = esi::esi_reconstruct(stack, params);
        benchmark::DoNotOptimize(results.front().image.data.data());
    }
}
BENCHMARK(BM_EsiReconstruct)->Arg(100);

void BM_HawkTransform(benchmark::State& state) {
    const auto stack = random_stack(static_cast<int>(state.range(0)), 64);
    hawk::HawkParams params;
    params.levels = static_cast<int>(state.range(1));
    for (auto _ : state) {
        auto out = hawk::hawk_transform(stack, params);
        benchmark::DoNotOptimize(out.data.data());
    }
}
BENCHMARK(BM_HawkTransform)->Args({100, 3})->Args({500, 5});

void BM_GibsonLanniPsf(benchmark::State& state) {
    OpticalConfig config;
    optics::PsfGridSpec grid;
    grid.lateral_extent_nm = 600.0;
    grid.axial_extent_nm = 300.0;
    for (auto _ : state) {
        auto psf = optics::gibson_lanni_psf(config, grid);
        benchmark::DoNotOptimize(psf.values.data());
    }
}
BENCHMARK(BM_GibsonLanniPsf);

}  // namespace

BENCHMARK_MAIN();
