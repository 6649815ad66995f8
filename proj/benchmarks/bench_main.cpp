// Microbenchmarks for the hot paths: per-beam gain evaluation, a full
// codebook sweep, directional policy construction, one simulated frame, and
// a single Q-table update.
#include <benchmark/benchmark.h>

#include <optional>
#include <vector>

#include "eetbf/metrics.hpp"
#include "eetbf/phys.hpp"
#include "eetbf/power.hpp"
#include "eetbf/select.hpp"
#include "eetbf/sim.hpp"

namespace {

eetbf::SimConfig default_config() {
    eetbf::SimConfig cfg;
    cfg.frames = 4;
    return cfg;
}

void BM_BeamGain(benchmark::State &state) {
    const double width = eetbf::beamwidth(886, 1.0);
    double psi = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eetbf::beam_gain(psi, width, 0.1234, 0.1));
        psi += 1e-6;
    }
}
BENCHMARK(BM_BeamGain);

void BM_FullSweepSnr(benchmark::State &state) {
    const auto n = state.range(0);
    const auto cb = eetbf::BeamCodebook::uniform(
        static_cast<int>(n), static_cast<int>(n), 2.0 * 3.141592653589793,
        3.141592653589793 / 2.0, -3.141592653589793, 3.141592653589793 / 2.0);
    const double p = 0.03, h = 1e-13, noise = 4e-12;
    std::vector<double> grid(static_cast<std::size_t>(n * n));
    for (auto _ : state) {
        for (int i = 0; i < n; ++i) {
            const double gh = eetbf::beam_gain(cb.h_directions[static_cast<std::size_t>(i)],
                                               cb.theta_h, 0.3, 0.1);
            for (int j = 0; j < n; ++j) {
                const double gv = eetbf::beam_gain(
                    cb.v_directions[static_cast<std::size_t>(j)], cb.theta_v, 1.9, 0.1);
                grid[static_cast<std::size_t>(i * n + j)] = eetbf::snr(p, h, gh, gv, noise);
            }
        }
        benchmark::DoNotOptimize(grid.data());
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_FullSweepSnr)->Arg(16)->Arg(40);

void BM_DirectionalPolicy(benchmark::State &state) {
    const auto cb = eetbf::BeamCodebook::uniform(
        40, 40, 2.0 * 3.141592653589793, 3.141592653589793 / 2.0,
        -3.141592653589793, 3.141592653589793 / 2.0);
    eetbf::AxisHistory h{{10, 11, 12, 13}, {20.0, 5.0, 22.0, 25.0}};
    eetbf::AxisHistory v{{7, 7, 8, 8}, {20.0, 5.0, 22.0, 25.0}};
    for (auto _ : state) {
        auto policy = eetbf::eetbf_bt(h, v, cb, 10.0, false);
        benchmark::DoNotOptimize(policy);
    }
}
BENCHMARK(BM_DirectionalPolicy);

void BM_RunFrame(benchmark::State &state) {
    const eetbf::SimConfig cfg = default_config();
    eetbf::RunState run(cfg);
    long frame = 0;
    for (auto _ : state) {
        auto rec = eetbf::run_frame(cfg, run, frame++);
        benchmark::DoNotOptimize(rec);
    }
}
BENCHMARK(BM_RunFrame);

void BM_QUpdate(benchmark::State &state) {
    eetbf::QTable q(100, 20);
    eetbf::PaSettings pa;
    for (auto _ : state) {
        eetbf::q_update(q, 50, 7, 0.8, 60, pa);
        benchmark::DoNotOptimize(q.at(50, 7));
    }
}
BENCHMARK(BM_QUpdate);

} // namespace

BENCHMARK_MAIN();
