#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <tuple>

#include "cocomo/error.hpp"
#include "cocomo/metrics.hpp"
#include "cocomo/scenario.hpp"
#include "cocomo/simulator.hpp"
#include "cocomo/sync.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace cocomo {
namespace {

const std::filesystem::path kData = COCOMO_TEST_DATA_DIR;

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return Errc::Io;
}

using Row = std::tuple<Tick, TraceKind, TaskId>;

std::vector<Row> rows_of(const Trace& trace) {
    std::vector<Row> rows;
    for (const auto& r : trace) rows.emplace_back(r.t, r.kind, r.task.value_or(-1));
    return rows;
}

TEST(Scenario, LoadsMinimalFile) {
    const Scenario sc = load_scenario(kData / "minimal.json");
    EXPECT_EQ(sc.tasks.size(), 1u);
    EXPECT_EQ(sc.stimuli.size(), 1u);
    EXPECT_EQ(sc.config.levels, 4);
    EXPECT_EQ(sc.horizon, 100);
}

TEST(Scenario, RoundTripsThroughJson) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Scenario sc = testing::random_scenario(seed);
        const std::string text = to_json(sc);
        EXPECT_EQ(to_json(parse_scenario(text)), text);
    }
}

TEST(Scenario, UnsortedStimuli) {
    EXPECT_EQ(code_of([] {
                  (void)parse_scenario(R"({"tasks": [{"id": 1, "class_tag": "a", "work": 3}],
                      "stimuli": [{"time": 5, "target": 1, "intensity": 1},
                                  {"time": 2, "target": 1, "intensity": 1}]})");
              }),
              Errc::ValidationError);
}

TEST(Scenario, UndeclaredSemaphore) {
    EXPECT_EQ(code_of([] {
                  (void)parse_scenario(R"({"tasks": [{"id": 1, "class_tag": "a", "work": 3}],
                      "sync_script": [{"task": 1, "at_work": 0, "op": "acquire", "resource": "m"}]})");
              }),
              Errc::ValidationError);
}

TEST(Scenario, OtherValidationFailures) {
    const char* bad[] = {
        R"({"horizon": 0, "tasks": []})",
        R"({"tasks": [{"id": 1, "class_tag": "a", "work": 3}, {"id": 1, "class_tag": "b", "work": 3}]})",
        R"({"tasks": [{"id": 1, "class_tag": "a", "work": 3}], "stimuli": [{"time": 0, "target": 9, "intensity": 1}]})",
        R"({"tasks": [{"id": 1, "class_tag": "a", "work": 0}]})",
        R"({"config": {"quanta": [10, 20]}, "tasks": []})",
    };
    for (const char* text : bad) {
        const Errc code = code_of([&] { (void)parse_scenario(text); });
        EXPECT_TRUE(code == Errc::ValidationError || code == Errc::InvalidConfig) << text;
    }
}

TEST(Scenario, ParseErrorsCarryLocation) {
    try {
        (void)parse_scenario("{\n  \"tasks\": [\n    {\"id\": 1,, }\n  ]\n}");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ParseError);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    try {
        (void)parse_scenario(R"({"tasks": [{"id": 1, "class_tag": 5, "work": 3}]})");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ParseError);
        EXPECT_NE(std::string(e.what()).find("tasks[0].class_tag"), std::string::npos) << e.what();
    }
}

TEST(Simulator, SingleStimulusRun) {
    const RunResult r = run(load_scenario(kData / "minimal.json"));
    EXPECT_EQ(rows_of(r.trace), (std::vector<Row>{{0, TraceKind::Admit, 1},
                                                   {0, TraceKind::Interrupt, 1},
                                                   {0, TraceKind::Dispatch, 1},
                                                   {5, TraceKind::Complete, 1}}));
    EXPECT_EQ(r.final_clock, 5);
    EXPECT_EQ(r.metrics.response.at("greeting").max, 0);
}

TEST(Simulator, NoStimuliLeavesEverythingParked) {
    Scenario sc = load_scenario(kData / "minimal.json");
    sc.stimuli.clear();
    sc.tasks.push_back({2, "other", 9, std::nullopt, std::nullopt});
    const RunResult r = run(sc);
    for (const auto& rec : r.trace) EXPECT_EQ(rec.kind, TraceKind::Admit);
    EXPECT_EQ(r.trace.size(), 2u);
}

// Hand-traced: the chore runs from 0, the siren crosses at 22 (4, 7.76,
// 11.29) and preempts at once; a second siren at 81 does the same. The chore
// finishes its preempted quantum, survives one boundary and fades at 185.
TEST(Simulator, SirenScenario) {
    const RunResult r = run(load_scenario(kData / "siren.json"));
    std::vector<Row> main;
    for (const auto& row : rows_of(r.trace)) {
        const auto kind = std::get<1>(row);
        if (kind != TraceKind::Reward && kind != TraceKind::Admit) main.push_back(row);
    }
    EXPECT_EQ(main, (std::vector<Row>{{0, TraceKind::Interrupt, 1},
                                      {0, TraceKind::Dispatch, 1},
                                      {22, TraceKind::Interrupt, 2},
                                      {22, TraceKind::Preempt, 1},
                                      {22, TraceKind::Dispatch, 2},
                                      {32, TraceKind::QuantumEnd, 2},
                                      {32, TraceKind::Dispatch, 2},
                                      {37, TraceKind::Complete, 2},
                                      {37, TraceKind::Dispatch, 1},
                                      {81, TraceKind::Interrupt, 3},
                                      {81, TraceKind::Preempt, 1},
                                      {81, TraceKind::Dispatch, 3},
                                      {91, TraceKind::Complete, 3},
                                      {91, TraceKind::Dispatch, 1},
                                      {105, TraceKind::QuantumEnd, 1},
                                      {105, TraceKind::Dispatch, 1},
                                      {185, TraceKind::Fade, 1}}));
    EXPECT_EQ(r.metrics.preemption_latency, (std::map<Tick, std::int64_t>{{0, 2}}));
    EXPECT_EQ(r.final_clock, 185);
}

TEST(Simulator, GoldenTrace) {
    const RunResult r = run(load_scenario(kData / "siren.json"));
    EXPECT_EQ(to_jsonl(r.trace), slurp(kData / "siren.golden.jsonl"));
}

TEST(Simulator, CoordinationScenarioCompletes) {
    const Scenario sc = load_scenario(kData / "coordination.json");
    const RunResult r = run(sc);
    int completes = 0;
    int blocks = 0;
    int feedback = 0;
    for (const auto& rec : r.trace) {
        completes += rec.kind == TraceKind::Complete;
        blocks += rec.kind == TraceKind::Block;
        feedback += rec.kind == TraceKind::Feedback;
    }
    EXPECT_EQ(completes, 3);
    EXPECT_GE(blocks, 2);
    EXPECT_EQ(feedback, 1);
    EXPECT_TRUE(testing::audit_trace(r.trace, sc.config.starvation_bound()).clean());
}

TEST(Simulator, DeadlockCarriesPartialTrace) {
    try {
        (void)run(load_scenario(kData / "deadlock.json"));
        FAIL();
    } catch (const DeadlockDetected& e) {
        EXPECT_EQ(e.cycle(), (std::vector<TaskId>{1, 2}));
        ASSERT_FALSE(e.partial_trace().empty());
        EXPECT_EQ(e.partial_trace().back().kind, TraceKind::Block);
        EXPECT_EQ(e.partial_trace().back().task, TaskId{2});
    }
}

TEST(Simulator, FeedbackArrivesNextTick) {
    Scenario sc;
    sc.learning.epsilon = 0.0;
    sc.tasks = {{1, "a", 3, std::nullopt, FeedbackSpec{2, 10.0, false}}, {2, "b", 2, std::nullopt, std::nullopt}};
    sc.stimuli = {{0, 1, 10.0, false}};
    const RunResult r = run(sc);
    EXPECT_EQ(rows_of(r.trace), (std::vector<Row>{{0, TraceKind::Admit, 1},
                                                   {0, TraceKind::Admit, 2},
                                                   {0, TraceKind::Interrupt, 1},
                                                   {0, TraceKind::Dispatch, 1},
                                                   {3, TraceKind::Complete, 1},
                                                   {3, TraceKind::Feedback, 1},
                                                   {4, TraceKind::Interrupt, 2},
                                                   {4, TraceKind::Dispatch, 2},
                                                   {6, TraceKind::Complete, 2}}));
}

TEST(SimulatorProperty, Deterministic) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const Scenario sc = testing::random_scenario(seed);
        EXPECT_EQ(to_jsonl(run(sc).trace), to_jsonl(run(sc).trace)) << "seed " << seed;
    }
}

TEST(SimulatorProperty, ReplayClosure) {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const Scenario sc = testing::random_scenario(seed);
        const RunResult r = run(sc);
        const Trace replayed = parse_jsonl(to_jsonl(r.trace));
        EXPECT_EQ(replayed, r.trace);
        EXPECT_EQ(metrics_of(replayed, {sc.config.starvation_bound()}), r.metrics);
    }
}

TEST(SimulatorProperty, SeedOnlyMattersThroughExploration) {
    for (std::uint64_t seed = 200; seed < 220; ++seed) {
        Scenario sc = testing::random_scenario(seed);
        sc.learning.epsilon = 0.0;
        const std::string a = to_jsonl(run(sc, {.seed = 1}).trace);
        const std::string b = to_jsonl(run(sc, {.seed = 987654321}).trace);
        EXPECT_EQ(a, b);
    }
}

TEST(SimulatorProperty, QuiescentBeforeHorizon) {
    for (std::uint64_t seed = 300; seed < 330; ++seed) {
        Scenario sc = testing::random_scenario(seed);
        for (auto& t : sc.tasks) t.feedback.reset();
        sc.horizon = 100000;
        Phase worst = Phase::Completed;
        std::map<TaskId, Phase> final_phase;
        const RunResult r = run(sc, {.seed = std::nullopt, .observer = [&](const Scheduler& s) {
                                         for (const auto& [id, t] : s.tasks()) final_phase[id] = t.phase;
                                     }});
        EXPECT_LT(r.final_clock, sc.horizon);
        for (const auto& [id, p] : final_phase) {
            if (p != Phase::Completed && p != Phase::Unconscious) worst = p;
        }
        EXPECT_EQ(worst, Phase::Completed) << "seed " << seed;
    }
}

TEST(SimulatorProperty, AuditCleanOnRandomScenarios) {
    for (std::uint64_t seed = 400; seed < 440; ++seed) {
        const Scenario sc = testing::random_scenario(seed);
        const auto audit = testing::audit_trace(run(sc).trace, sc.config.starvation_bound());
        EXPECT_EQ(audit.priority_violations, 0) << seed;
        EXPECT_EQ(audit.conservation_violations, 0) << seed << " " << (audit.messages.empty() ? "" : audit.messages[0]);
    }
}

}  // namespace
}  // namespace cocomo
