#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "apstab/analysis.hpp"
#include "apstab/certificate.hpp"
#include "apstab/integrator.hpp"
#include "apstab/model.hpp"
#include "apstab/signal.hpp"

using namespace apstab;

namespace {

QuasiPeriodicSignal wavy(double offset, double amp, double freq) {
    return QuasiPeriodicSignal(offset, {{amp, freq, 0.0}});
}

/// n-dimensional discrete-delay network with mildly varying coefficients,
/// sized so the criterion is comfortably feasible.
NetworkModel make_atom_model(std::size_t n) {
    std::vector<QuasiPeriodicSignal> d(n, QuasiPeriodicSignal::constant(2.0));
    std::vector<QuasiPeriodicSignal> a(n * n, QuasiPeriodicSignal::constant(0.05));
    std::vector<QuasiPeriodicSignal> b(n * n, QuasiPeriodicSignal::constant(0.05));
    std::vector<QuasiPeriodicSignal> tau(n * n, QuasiPeriodicSignal::constant(0.2));
    std::vector<QuasiPeriodicSignal> inputs(n, wavy(0.0, 0.4, 1.0));
    for (std::size_t i = 0; i < n; ++i) {
        a[i * n + i] = wavy(0.3 / static_cast<double>(n) + 0.2, 0.05, 1.0);
        b[i * n + i] = QuasiPeriodicSignal::constant(0.2);
    }
    std::vector<ActivationSpec> g(n, ActivationSpec::tanh_unit());
    std::vector<ActivationSpec> f(n, ActivationSpec::tanh_unit(false));
    return from_discrete_delays(d, a, b, tau, inputs, g, f,
                                HistoryFunction::constant(std::vector<double>(n, 0.5)));
}

NetworkModel make_density_model() {
    std::vector<DistributedKernelParams> kp{{2.0, 1, 2.0}};
    return from_distributed_delays(
        {QuasiPeriodicSignal::constant(2.0)}, {QuasiPeriodicSignal::constant(0.4)},
        {QuasiPeriodicSignal::constant(0.4)}, kp, {QuasiPeriodicSignal::constant(0.1)},
        {wavy(0.0, 0.5, 1.0)}, {ActivationSpec::tanh_unit()}, {ActivationSpec::tanh_unit(false)},
        HistoryFunction::constant({0.25}));
}

void BM_SignalEval(benchmark::State& state) {
    const QuasiPeriodicSignal sig(0.5, {{0.3, 1.0, 0.0}, {0.2, 1.414, 0.4}, {0.1, 3.7, 1.1}});
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sig.value(t));
        t += 0.01;
    }
}
BENCHMARK(BM_SignalEval);

void BM_KernelMoment(benchmark::State& state) {
    DelayKernel kernel;
    kernel.atoms.push_back({0.5, QuasiPeriodicSignal::constant(0.3)});
    kernel.densities.push_back({QuasiPeriodicSignal::constant(0.4), 2, 1.0, 2.0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernel_moment(kernel, 0.5));
    }
}
BENCHMARK(BM_KernelMoment);

void BM_KernelConvolve(benchmark::State& state) {
    DelayKernel kernel;
    kernel.densities.push_back({QuasiPeriodicSignal::constant(1.0), 0, 2.0, 2.0});
    const ActivationSpec f = ActivationSpec::tanh_unit(false);
    const auto lookup = [](double s) { return std::sin(s); };
    ConvolutionQuadrature quad;
    quad.s_max = 10.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernel_convolve(kernel, 0.0, 0.0, f, lookup, quad));
    }
}
BENCHMARK(BM_KernelConvolve);

void BM_SpectralRadius(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(7);
    Matrix m(n);
    for (double& v : m.a) {
        v = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 0.9 / static_cast<double>(n);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral_radius(m));
    }
}
BENCHMARK(BM_SpectralRadius)->Arg(4)->Arg(16)->Arg(64);

void BM_Certify(benchmark::State& state) {
    const NetworkModel model = make_atom_model(static_cast<std::size_t>(state.range(0)));
    const BoundsSummary bounds = derive_bounds(model);
    for (auto _ : state) {
        benchmark::DoNotOptimize(maximize_beta(bounds));
    }
}
BENCHMARK(BM_Certify)->Arg(2)->Arg(8)->Arg(32);

void BM_IntegrateAtoms(benchmark::State& state) {
    const NetworkModel model = make_atom_model(4);
    SimConfig cfg;
    cfg.step = 1e-2;
    cfg.horizon = 5.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate(model, cfg));
    }
}
BENCHMARK(BM_IntegrateAtoms);

void BM_IntegrateDensity(benchmark::State& state) {
    const NetworkModel model = make_density_model();
    SimConfig cfg;
    cfg.step = 1e-2;
    cfg.horizon = 5.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate(model, cfg));
    }
}
BENCHMARK(BM_IntegrateDensity);

}  // namespace

BENCHMARK_MAIN();
