#include <benchmark/benchmark.h>

#include "redsim/distributions.hpp"
#include "redsim/event_calendar.hpp"
#include "redsim/server.hpp"
#include "redsim/simulation.hpp"
#include "redsim/statistics.hpp"

namespace {

using namespace redsim;

// Simulated jobs per second at rho_tilde = 0.7, N = 10.
void BM_Simulation(benchmark::State& state) {
    SimConfig cfg;
    cfg.servers = 10;
    cfg.replicas = static_cast<int>(state.range(0));
    cfg.discipline = state.range(1) == 0 ? Discipline::FCFS : Discipline::PS;
    cfg.dist = normalize_to_unit_mean(JobSizeDistribution::weibull(0.8, 1.0));
    cfg.lambda = 0.7 * cfg.servers / (cfg.replicas * expected_min(cfg.dist, cfg.replicas, cfg.dependence));
    cfg.horizon = 2e4;
    cfg.warmup = 0.0;
    std::uint64_t jobs = 0;
    for (auto _ : state) {
        const SimOutput out = run_simulation(cfg);
        jobs += out.jobs_completed;
        benchmark::DoNotOptimize(out.latencies.data());
        ++cfg.seed;
    }
    state.counters["jobs/s"] = benchmark::Counter(static_cast<double>(jobs), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Simulation)
    ->ArgsProduct({{1, 2, 5, 10}, {0, 1}})
    ->ArgNames({"d", "ps"})
    ->Unit(benchmark::kMillisecond);

void BM_PsServerChurn(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    RandomStream rng(3);
    for (auto _ : state) {
        PsServer s;
        double now = 0.0;
        for (std::uint32_t i = 0; i < n; ++i) s.enqueue({i, i}, 1.0 + rng.uniform(), now);
        while (s.busy()) {
            now = s.next_departure(now)->time;
            s.advance_to(now);
            benchmark::DoNotOptimize(s.complete_departure(now));
        }
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PsServerChurn)->Range(8, 4096);

void BM_EventCalendar(benchmark::State& state) {
    const auto n = state.range(0);
    RandomStream rng(5);
    for (auto _ : state) {
        EventCalendar cal;
        for (std::int64_t i = 0; i < n; ++i) cal.schedule_departure(rng.uniform(), 0, 0);
        while (!cal.empty()) benchmark::DoNotOptimize(cal.pop());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EventCalendar)->Range(64, 1 << 16);

void BM_HillTailIndex(benchmark::State& state) {
    RandomStream rng(9);
    const auto dist = JobSizeDistribution::pareto(2.5, 1.0);
    std::vector<double> xs(static_cast<std::size_t>(state.range(0)));
    for (auto& x : xs) x = sample(dist, rng);
    for (auto _ : state) benchmark::DoNotOptimize(hill_tail_index(xs, 0.05));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HillTailIndex)->Range(1 << 12, 1 << 20);

void BM_QuadratureMinMoment(benchmark::State& state) {
    const auto dist = normalize_to_unit_mean(JobSizeDistribution::weibull(0.8, 1.0));
    for (auto _ : state) benchmark::DoNotOptimize(second_moment_min_by_quadrature(dist, 5));
}
BENCHMARK(BM_QuadratureMinMoment);

}  // namespace

BENCHMARK_MAIN();
