// Serial reference kernel against the OpenMP kernel, plus TMM throughput.

#include <benchmark/benchmark.h>

#include <vector>

#include "hemicav/coating.hpp"
#include "hemicav/fdtd/solver.hpp"
#include "hemicav/tmm.hpp"

using namespace hcav;

namespace {

// Hemispherical L = R = 10 um cavity on a 750 nm DBR.
const fdtd::SimulationDomain& cavity(int resolution) {
    static std::vector<std::pair<int, fdtd::SimulationDomain>> cache;
    for (const auto& [r, d] : cache)
        if (r == resolution) return d;
    const auto dbr = tmm::quarter_wave_stack(2.3, 1.45, 1.5, 750.0, 8, false, false);
    fdtd::DomainOptions o;
    o.design_wavelength_nm = 750.0;
    o.resolution = resolution;
    o.azimuthal_order = 1;
    o.radial_extent_um = 9.5;
    cache.emplace_back(resolution,
                       fdtd::build_domain({10.0, 10.0}, dbr, coating::DimpleGeometry::from_depth(10.0, 6.0), o));
    return cache.back().second;
}

void prime(fdtd::Simulation& sim) {
    const auto& d = sim.domain();
    fdtd::SourceSpec s;
    s.r_um = 0.5 * d.cell_um;
    s.z_um = d.surface_z_um() + d.cell_um;
    s.center_thz = 400.0;
    s.bandwidth_thz = 80.0;
    sim.set_source(s);
    sim.run(200);
    sim.clear_source();
}

void BM_FdtdStep(benchmark::State& state, bool serial) {
    const auto& d = cavity(static_cast<int>(state.range(0)));
    fdtd::Simulation sim(d, serial);
    prime(sim);
    for (auto _ : state) sim.step();
    state.counters["cells/s"] =
        benchmark::Counter(static_cast<double>(d.nr) * d.nz, benchmark::Counter::kIsIterationInvariantRate);
}

void BM_FdtdStepReference(benchmark::State& state) { BM_FdtdStep(state, true); }
void BM_FdtdStepParallel(benchmark::State& state) { BM_FdtdStep(state, false); }

void BM_TmmSweep(benchmark::State& state) {
    const auto stack = tmm::quarter_wave_stack(2.3, 1.45, 1.5, 750.0, static_cast<int>(state.range(0)), true, true);
    std::vector<double> wl(2001);
    for (std::size_t i = 0; i < wl.size(); ++i) wl[i] = 500.0 + 0.25 * static_cast<double>(i);
    for (auto _ : state) benchmark::DoNotOptimize(tmm::sweep(stack, wl, 0.0, tmm::Polarization::TE));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(wl.size()));
}

}  // namespace

BENCHMARK(BM_FdtdStepReference)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FdtdStepParallel)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TmmSweep)->Arg(8)->Arg(30)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
