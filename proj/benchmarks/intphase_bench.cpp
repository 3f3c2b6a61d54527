#include <benchmark/benchmark.h>

#include "intphase/analysis.hpp"
#include "intphase/constants.hpp"
#include "intphase/geometry.hpp"
#include "intphase/model.hpp"
#include "intphase/phase.hpp"
#include "intphase/trajectory.hpp"

namespace {

using namespace intphase;

GeometrySpec mach_zehnder() {
    const AtomSpecies sr = sr88_species(nullptr);
    return build_ai_mach_zehnder(sr, violation_from_alpha(1e-3, sr),
                                 make_environment(9.81), 1.54586e7, 0.1);
}

GeometrySpec levitated(int relaunches) {
    const AtomSpecies sr = sr88_species(nullptr);
    const double T = 4.5e-3;
    const double k = 0.02 * sr.mass / (kHbar * T);
    return build_ai_levitated(sr, violation_from_alpha(1e-3, sr), make_environment(9.81),
                              k, T, relaunches, 9.81);
}

void bm_mach_zehnder_phases(benchmark::State& state) {
    const GeometrySpec spec = mach_zehnder();
    for (auto _ : state) benchmark::DoNotOptimize(compute_phases(spec));
}
BENCHMARK(bm_mach_zehnder_phases);

void bm_levitated_differential(benchmark::State& state) {
    const GeometrySpec spec = levitated(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(phase_dynamical_differential(spec));
}
BENCHMARK(bm_levitated_differential)->Arg(100)->Arg(2000);

void bm_guided_clock_adaptive(benchmark::State& state) {
    const AtomSpecies sr = sr88_species(nullptr);
    const GeometrySpec spec =
        build_clock_guided(sr, violation_from_alpha(1e-3, sr), make_environment(9.81),
                           make_trap(kTwoPi * 50.0), 0.005, 1.0, 10.0);
    EvalOptions opts;
    opts.quadrature = QuadMode::adaptive;
    opts.quad_tol = 1e-12;
    for (auto _ : state) benchmark::DoNotOptimize(phase_dynamical_differential(spec, opts));
}
BENCHMARK(bm_guided_clock_adaptive);

void bm_classifier_grid(benchmark::State& state) {
    const GeometrySpec spec = mach_zehnder();
    for (auto _ : state) benchmark::DoNotOptimize(classify_ugr(spec));
}
BENCHMARK(bm_classifier_grid);

void bm_propagate_branch(benchmark::State& state) {
    const GeometrySpec spec = levitated(2000);
    const AtomSpecies sr = sr88_species(nullptr);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            propagate_branch(spec.upper, sr.mass, 9.81, 0.0, spec.t_final));
}
BENCHMARK(bm_propagate_branch);

}  // namespace

BENCHMARK_MAIN();
