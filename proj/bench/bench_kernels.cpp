#include <benchmark/benchmark.h>

#include "wfix/mappings.hpp"
#include "wfix/wspace.hpp"

using namespace wfix;

namespace {

void axioms(benchmark::State& state, const char* space_name, Exec exec) {
    auto space = make_space(space_name);
    const auto samples = draw_axiom_samples(*space, space->default_sampler(), static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) {
        auto report = check_axioms(*space, samples, real{1e-9}, exec);
        benchmark::DoNotOptimize(report);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void contractive(benchmark::State& state, Exec exec) {
    auto space = make_space("halfplane");
    const auto t = make_mapping("halfplane-contract:0.5", space);
    const auto pairs = draw_pairs(*space, t.domain.sampler, static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) {
        auto report = verify_contractive_like(*space, t, pairs, real{1e-12}, exec);
        benchmark::DoNotOptimize(report);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(axioms, halfplane_serial, "halfplane", Exec::serial)->Arg(10000)->Arg(100000);
BENCHMARK_CAPTURE(axioms, halfplane_parallel, "halfplane", Exec::parallel)->Arg(10000)->Arg(100000);
BENCHMARK_CAPTURE(axioms, tripod_serial, "tripod", Exec::serial)->Arg(100000);
BENCHMARK_CAPTURE(axioms, tripod_parallel, "tripod", Exec::parallel)->Arg(100000);
BENCHMARK_CAPTURE(contractive, serial, Exec::serial)->Arg(100000);
BENCHMARK_CAPTURE(contractive, parallel, Exec::parallel)->Arg(100000);

BENCHMARK_MAIN();
