#include <benchmark/benchmark.h>

#include "cpgd/denoise.hpp"
#include "cpgd/fri.hpp"
#include "cpgd/lowrank.hpp"
#include "cpgd/random.hpp"
#include "cpgd/solvers.hpp"
#include "cpgd/toeplitz.hpp"

// Hot-path costs across coefficient counts: the FFT-backed embedding
// products, the rank factorisation they feed, one denoising sweep, and a
// full outer iteration of the descent.

namespace {

using namespace cpgd;

constexpr Index kSpikes = 9;

FourierVector noisy_generator(Index n, uint64_t seed) {
    const Index m = (n - 1) / 2;
    const DiracStream stream = random_stream(kSpikes, seed);
    FourierVector x = fourier_coefficients(stream, m);
    rng::Engine engine(rng::derive(seed, 1));
    const double level = 0.05 * x.values().norm() / std::sqrt(double(n));
    for (Index i = 0; i < n; ++i)
        x.values()(i) += level * rng::complex_gaussian(engine);
    return x;
}

void BM_ToeplitzApply(benchmark::State& state) {
    const Index n = state.range(0);
    const Index m = (n - 1) / 2;
    const ToeplitzEmbedding t = toeplitzify(noisy_generator(n, 42), m);
    rng::Engine engine(7);
    ComplexVector u(t.cols());
    for (Index i = 0; i < u.size(); ++i) u(i) = rng::complex_gaussian(engine);
    for (auto _ : state) benchmark::DoNotOptimize(t.apply(u));
    state.SetComplexityN(n);
}
BENCHMARK(BM_ToeplitzApply)->Arg(73)->Arg(289)->Arg(1153)->Arg(4609)
    ->Complexity(benchmark::oNLogN);

void BM_ToeplitzApplyAdjoint(benchmark::State& state) {
    const Index n = state.range(0);
    const Index m = (n - 1) / 2;
    const ToeplitzEmbedding t = toeplitzify(noisy_generator(n, 42), m);
    rng::Engine engine(7);
    ComplexVector v(t.rows());
    for (Index i = 0; i < v.size(); ++i) v(i) = rng::complex_gaussian(engine);
    for (auto _ : state) benchmark::DoNotOptimize(t.apply_adjoint(v));
    state.SetComplexityN(n);
}
BENCHMARK(BM_ToeplitzApplyAdjoint)->Arg(73)->Arg(289)->Arg(1153)->Arg(4609)
    ->Complexity(benchmark::oNLogN);

void BM_EmbeddingTopSvd(benchmark::State& state) {
    const Index n = state.range(0);
    const Index m = (n - 1) / 2;
    const ToeplitzEmbedding t = toeplitzify(noisy_generator(n, 42), m);
    for (auto _ : state)
        benchmark::DoNotOptimize(embedding_top_svd(t, kSpikes));
    state.SetComplexityN(n);
}
BENCHMARK(BM_EmbeddingTopSvd)->Arg(73)->Arg(289)->Arg(1153);

void BM_CadzowSweep(benchmark::State& state) {
    const Index n = state.range(0);
    const FourierVector x = noisy_generator(n, 42);
    DenoiseConfig cfg;
    cfg.rank = kSpikes;
    cfg.order = x.half_bandwidth();
    cfg.iterations = 1;
    for (auto _ : state) benchmark::DoNotOptimize(cadzow_denoise(x, cfg));
    state.SetComplexityN(n);
}
BENCHMARK(BM_CadzowSweep)->Arg(73)->Arg(289)->Arg(1153);

void BM_CpgdIteration(benchmark::State& state) {
    const Index n = state.range(0);
    const Index m = (n - 1) / 2;
    const DiracStream stream = random_stream(kSpikes, 42);
    const SamplingScheme scheme =
        random_scheme(n, m, rng::derive(42, 1), 0.5 / double(n));
    const ForwardModel model = synthesize_measurements(
        stream, scheme, psnr_to_sigma(10.0, stream), rng::derive(42, 2));
    const double tau = default_step_size(model);
    DenoiseConfig map;
    map.rank = kSpikes;
    map.order = m;
    map.iterations = 10;
    map.radius = default_radius(model);
    FourierVector x = FourierVector::zero(m);
    for (auto _ : state) {
        x = inexact_prox(gradient_step(x, model, tau), map);
        benchmark::DoNotOptimize(x);
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_CpgdIteration)->Arg(73)->Arg(289)->Arg(1153);

}  // namespace

BENCHMARK_MAIN();
