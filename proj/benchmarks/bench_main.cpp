#include <benchmark/benchmark.h>

#include <vector>

#include "cocomo/attention.hpp"
#include "cocomo/crit.hpp"
#include "cocomo/random.hpp"
#include "cocomo/scheduler.hpp"
#include "cocomo/simulator.hpp"

using namespace cocomo;

// Ticks of a busy scheduler with n conscious tasks and a steady trickle of
// interrupts from the pool.
static void BM_SchedulerTicks(benchmark::State& state) {
    const auto n = static_cast<TaskId>(state.range(0));
    for (auto _ : state) {
        state.PauseTiming();
        LearningConfig lc;
        lc.epsilon = 0.0;
        RewardTable table(lc);
        table.set("default", "hot", 9.0);
        table.set("default", "cold", 2.0);
        Scheduler s(SchedulerConfig{}, table, 1);
        for (TaskId id = 1; id <= n; ++id) {
            s.admit(Task::make(id, id % 2 ? "hot" : "cold", 1'000'000), static_cast<int>(id % 4));
        }
        for (TaskId id = n + 1; id <= 2 * n; ++id) {
            s.admit(Task::make(id, "hot", 50));
        }
        state.ResumeTiming();
        TaskId next_pool = n + 1;
        for (Tick t = 0; t < 1000; ++t) {
            if (t % 10 == 0 && next_pool <= 2 * n) {
                s.stimulate({t, next_pool++, 12.0, false});
            }
            if (!s.attended()) (void)s.next();
            benchmark::DoNotOptimize(s.run_tick());
        }
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SchedulerTicks)->Arg(8)->Arg(64)->Arg(512);

static void BM_Reprioritize(benchmark::State& state) {
    const auto n = static_cast<TaskId>(state.range(0));
    RewardTable table;
    Scheduler s(SchedulerConfig{}, table, 1);
    for (TaskId id = 1; id <= n; ++id) {
        s.admit(Task::make(id, "c" + std::to_string(id % 7), 100), static_cast<int>(id % 4));
    }
    double v = 0.0;
    for (auto _ : state) {
        s.observe({"default", "c" + std::to_string(static_cast<int>(v) % 7), v, "default"});
        v += 1.0;
        s.reprioritize();
        (void)s.take_trace();
    }
}
BENCHMARK(BM_Reprioritize)->Arg(16)->Arg(256);

static void BM_Accumulate(benchmark::State& state) {
    const AttentionConfig cfg;
    Energy e;
    Tick t = 0;
    for (auto _ : state) {
        const auto acc = accumulate(e, ++t, 0.6, cfg);
        e = acc.energy;
        benchmark::DoNotOptimize(acc.crossed_up);
    }
}
BENCHMARK(BM_Accumulate);

static void BM_Aggregate(benchmark::State& state) {
    Rng rng(3);
    std::vector<crit::ReasonScore> sup(static_cast<std::size_t>(state.range(0)));
    std::vector<crit::ReasonScore> riv(static_cast<std::size_t>(state.range(0)) / 2);
    for (auto& s : sup) s = {1 + 9 * uniform01(rng), 1 + 9 * uniform01(rng)};
    for (auto& s : riv) s = {1 + 9 * uniform01(rng), 1 + 9 * uniform01(rng)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(crit::aggregate(sup, riv));
    }
}
BENCHMARK(BM_Aggregate)->Arg(4)->Arg(64);

static void BM_SimulateScenario(benchmark::State& state) {
    Scenario sc;
    sc.learning.epsilon = 0.1;
    sc.horizon = 2000;
    for (TaskId id = 1; id <= 40; ++id) {
        sc.tasks.push_back({id, id % 3 ? "routine" : "urgent", 30 + id * 7, std::nullopt, std::nullopt});
    }
    sc.initial_values = {{"default", "urgent", 9.0}, {"default", "routine", 3.0}};
    for (Tick t = 0; t < 1500; t += 5) {
        sc.stimuli.push_back({t, 1 + (t / 5) % 40, 6.0, t % 3 == 0});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(run(sc).final_clock);
    }
}
BENCHMARK(BM_SimulateScenario);
BENCHMARK_MAIN();
