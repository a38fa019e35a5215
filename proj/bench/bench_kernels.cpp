// Serial reference vs OpenMP kernels on a paper-sized scene.
// Build with -DCMAKE_BUILD_TYPE=Release; run ./ps_bench.

#include <benchmark/benchmark.h>

#include "ps/integrate.hpp"
#include "ps/reference.hpp"
#include "ps/render.hpp"
#include "ps/scene.hpp"

namespace {

struct Fixture {
    ps::Grid grid = ps::make_grid(200, 200, 2.02);
    ps::HeightField height = ps::make_surface(grid, ps::MultiPeak{});
    ps::SurfaceField surface = ps::normals_from_height(height);
    ps::LightSet lights = ps::make_light_ring(
        7, 1.5, [] {
            std::vector<ps::Vector3> off(7, ps::Vector3::Zero());
            off[0] = ps::ring_tilt_offset(7, 1.5, 1, 10.0 * 3.14159265358979 / 180.0);
            return off;
        }());
    ps::GradientField grad = ps::gradient_from_normals(surface, grid);
    ps::LaplacianField rhs = ps::divergence(grad);
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

void normals_serial(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            ps::reference::normals_from_height(fixture().height));
    }
}
BENCHMARK(normals_serial)->Unit(benchmark::kMillisecond);

void normals_parallel(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(ps::normals_from_height(fixture().height));
    }
}
BENCHMARK(normals_parallel)->Unit(benchmark::kMillisecond);

void render_serial(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(ps::reference::render(
            fixture().surface, fixture().lights, fixture().grid));
    }
}
BENCHMARK(render_serial)->Unit(benchmark::kMillisecond);

void render_parallel(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            ps::render(fixture().surface, fixture().lights, fixture().grid));
    }
}
BENCHMARK(render_parallel)->Unit(benchmark::kMillisecond);

void divergence_serial(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(ps::reference::divergence(fixture().grad));
    }
}
BENCHMARK(divergence_serial)->Unit(benchmark::kMillisecond);

void divergence_parallel(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(ps::divergence(fixture().grad));
    }
}
BENCHMARK(divergence_parallel)->Unit(benchmark::kMillisecond);

void poisson_dst_serial(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(ps::reference::poisson_fast_sine(fixture().rhs));
    }
}
BENCHMARK(poisson_dst_serial)->Unit(benchmark::kMillisecond);

void poisson_dst_parallel(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            ps::poisson_solve(fixture().rhs, ps::PoissonMethod::FastSine));
    }
}
BENCHMARK(poisson_dst_parallel)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
