#include "conequant/spectrum.hpp"
#include "conequant/symmetry.hpp"

#include <benchmark/benchmark.h>

using namespace conequant;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::kParallel : Execution::kSerial; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) ? "parallel" : "serial"); }

void BM_DeterminingResiduals(benchmark::State& state)
{
    const auto params = cone::ModelParams::harmonic(0.6, 1.5);
    const auto basis = sym::builtin_generators(sym::GeneratorSet::kXi, params);
    const auto jets = sym::sample_jets(1, 2000);
    for (auto _ : state) {
        for (const auto& x : basis) {
            benchmark::DoNotOptimize(sym::determining_residual_stats(x, params, jets, mode(state)));
        }
    }
    label(state);
}
BENCHMARK(BM_DeterminingResiduals)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_InnerProduct(benchmark::State& state)
{
    const spec::PdeVariant v(spec::VariantTag::kNoetherHo, cone::ModelParams::harmonic(0.6, 1.0));
    const auto f = spec::closed_form_eigenfunction(v, 2, 1);
    const auto g = spec::closed_form_eigenfunction(v, 3, 1);
    spec::InnerProductOptions opts;
    opts.execution = mode(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(spec::inner_product(f, g, opts));
    }
    label(state);
}
BENCHMARK(BM_InnerProduct)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EvolutionaryActions(benchmark::State& state)
{
    const spec::PdeVariant v(spec::VariantTag::kKowalskiHo, cone::ModelParams::harmonic(0.6, 1.5));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            spec::evolutionary_action_report(v, sym::Transcription::kCorrected, 1, 400, 1e-8, mode(state)));
    }
    label(state);
}
BENCHMARK(BM_EvolutionaryActions)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// The acceptance sweep: 3 k x 3 omega x 5 p, six levels each.
void BM_SpectrumSweep(benchmark::State& state)
{
    for (auto _ : state) {
        const auto e = map_indices<double>(45, mode(state), [](int i) {
            const double k = 0.3 * (1 + i / 15);
            const double w = 0.5 * (1 << ((i / 5) % 3));
            const spec::RadialProblem rp{spec::VariantTag::kNoetherHo,
                                         spec::effective_index(spec::Quantization::kNoether, i % 5 - 2, k), w, 0.0};
            return spec::solve_bound_states(rp, 5).pairs.back().E;
        });
        benchmark::DoNotOptimize(e);
    }
    label(state);
}
BENCHMARK(BM_SpectrumSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
