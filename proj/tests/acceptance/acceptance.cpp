// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cocomo/attention.hpp"
#include "cocomo/crit.hpp"
#include "cocomo/crit_io.hpp"
#include "cocomo/scenario.hpp"
#include "cocomo/simulator.hpp"
#include "cocomo/sync.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/toy_mdp.hpp"

namespace fs = std::filesystem;
using namespace cocomo;
using testing::audit_trace;

namespace {

const fs::path kData = COCOMO_TEST_DATA_DIR;

struct Collected {
    std::string name;
    Trace trace;
    Tick bound = 0;
};

// Every trace produced below, for the ordering and conservation sweeps.
std::vector<Collected> g_traces;

// Per-tick structural checks gathered by the run observer.
struct TickChecks {
    long ticks = 0;
    long failures = 0;
    std::string first;
};
TickChecks g_ticks;

RunResult checked_run(const std::string& name, const Scenario& sc, RunOptions opts = {}) {
    std::vector<TaskId> previous;
    bool have_previous = false;
    opts.observer = [&](const Scheduler& s) {
        ++g_ticks.ticks;
        auto ids = s.resident_ids();
        std::string problem;
        if (auto bad = s.check_invariants()) problem = *bad;
        if (have_previous && problem.empty()) {
            // Only completed tasks may leave the resident multiset.
            std::vector<TaskId> expected;
            for (TaskId id : previous) {
                if (s.task(id).phase != Phase::Completed) expected.push_back(id);
            }
            if (expected != ids) problem = "resident multiset changed";
        }
        if (!problem.empty()) {
            if (g_ticks.failures++ == 0) g_ticks.first = name + " t=" + std::to_string(s.clock()) + ": " + problem;
        }
        previous = std::move(ids);
        have_previous = true;
    };
    RunResult r = run(sc, opts);
    g_traces.push_back({name, r.trace, sc.config.starvation_bound()});
    return r;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int g_failed = 0;
std::map<int, std::string> g_lines;  // printed in criterion order at the end

void report(int n, const char* title, bool ok, const std::string& detail) {
    char head[96];
    std::snprintf(head, sizeof head, "[%s] criterion %2d %s: ", ok ? "PASS" : "FAIL", n, title);
    g_lines[n] = head + detail;
    g_failed += !ok;
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

void determinism() {
    const auto start = std::chrono::steady_clock::now();
    int mismatched = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Scenario sc = testing::random_scenario(seed);
        const auto a = to_jsonl(checked_run("random-" + std::to_string(seed), sc).trace);
        const auto b = to_jsonl(run(sc).trace);
        mismatched += a != b;
    }
    const double t = seconds_since(start);
    report(1, "determinism", mismatched == 0 && t < 10.0,
           std::to_string(50 - mismatched) + "/50 scenarios byte-identical, " + fmt("%.2f s", t));
}

void starvation() {
    int violations = 0;
    int metric_events = 0;
    Tick worst = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Scenario sc = testing::adversarial_scenario(seed);
        const RunResult r = checked_run("adversarial-" + std::to_string(seed), sc);
        const auto audit = audit_trace(r.trace, 550);
        violations += audit.starvation_violations;
        metric_events += static_cast<int>(r.metrics.starvation_events);
        worst = std::max(worst, audit.max_ready_wait);
    }
    report(3, "starvation-freedom", violations == 0 && metric_events == 0,
           std::to_string(violations) + " waits over 550 ticks in 20 scenarios (longest wait " +
               std::to_string(worst) + ")");
}

void energy_oracle() {
    Rng rng(2718);
    double worst = 0.0;
    for (int script = 0; script < 1000; ++script) {
        AttentionConfig cfg;
        cfg.tau = 1.0 + 50.0 * uniform01(rng);
        std::vector<testing::Pulse> pulses;
        Energy e;
        Tick t = 0;
        const auto n = 1 + uniform_below(rng, 60);
        for (std::uint64_t k = 0; k < n; ++k) {
            t += static_cast<Tick>(uniform_below(rng, 10));
            const double x = 15.0 * uniform01(rng);
            pulses.push_back({t, x});
            e = accumulate(e, t, x, cfg).energy;
            worst = std::max(worst, std::abs(e.value - testing::closed_form_energy(pulses, cfg.tau, t)));
        }
        const Tick later = t + static_cast<Tick>(uniform_below(rng, 100));
        worst = std::max(worst, std::abs(decay(e, later, cfg.tau).value -
                                         testing::closed_form_energy(pulses, cfg.tau, later)));
    }
    report(4, "energy oracle", worst < 1e-9, "max abs error " + fmt("%.3g", worst) + " over 1000 scripts");
}

void interrupt_semantics() {
    const Scenario sc = load_scenario(kData / "siren.json");
    const RunResult r = checked_run("siren", sc);
    std::map<TaskId, std::vector<testing::Pulse>> by_target;
    for (const auto& s : sc.stimuli) by_target[s.target].push_back({s.time, s.intensity});
    int expected = 0;
    for (const auto& [id, pulses] : by_target) {
        expected += testing::tick_replay_crossings(pulses, sc.config.attention.tau, sc.config.attention.wake_threshold);
    }
    int interrupts = 0;
    for (const auto& rec : r.trace) interrupts += rec.kind == TraceKind::Interrupt;
    std::int64_t preempts = 0;
    std::int64_t late = 0;
    for (const auto& [latency, count] : r.metrics.preemption_latency) {
        preempts += count;
        if (latency != 0) late += count;
    }
    report(5, "interrupt semantics", interrupts == expected && preempts > 0 && late == 0,
           std::to_string(interrupts) + " interrupts for " + std::to_string(expected) + " crossings, " +
               std::to_string(preempts) + " preemptions, " + std::to_string(late) + " with latency > 0");
}

void fading() {
    const AttentionConfig cfg;
    const double analytic = cfg.tau * std::log(cfg.wake_threshold / cfg.fade_threshold);
    const auto bound = static_cast<Tick>(std::ceil(analytic));
    int checked = 0;
    int bad = 0;
    std::string first;
    for (Tick lowest_quantum : {25, 26, 30, 40, 80}) {
        Scenario sc;
        sc.config.quanta = {5, 10, 20, lowest_quantum};
        sc.learning.epsilon = 0.0;
        sc.horizon = 5000;
        for (TaskId id = 1; id <= 3; ++id) {
            sc.tasks.push_back({id, "idle", 500, std::nullopt, std::nullopt});
            sc.stimuli.push_back({0, id, 10.0, false});
        }
        const RunResult r = checked_run("fade-" + std::to_string(lowest_quantum), sc);
        std::map<TaskId, std::pair<Tick, Tick>> dispatch;  // last dispatch time, quantum
        int fades = 0;
        for (const auto& rec : r.trace) {
            if (rec.kind == TraceKind::Dispatch) dispatch[*rec.task] = {rec.t, *rec.int_field("quantum")};
            if (rec.kind != TraceKind::Fade) continue;
            ++fades;
            ++checked;
            const auto [d, q] = dispatch.at(*rec.task);
            // Faded at the first quantum boundary at or past the analytic bound.
            if (rec.t - d < bound || rec.t != d + q) {
                ++bad;
                if (first.empty()) first = "; task " + std::to_string(*rec.task) + " faded at " + std::to_string(rec.t);
            }
        }
        const bool should = lowest_quantum >= bound;
        if ((fades == 3) != should) {
            ++bad;
            if (first.empty()) first = "; quantum " + std::to_string(lowest_quantum) + " gave " + std::to_string(fades) + " fades";
        }
    }
    report(6, "fading", bad == 0 && checked > 0,
           std::to_string(checked) + " fades at the first boundary >= " + std::to_string(bound) +
               " ticks after dispatch (analytic " + fmt("%.4f", analytic) + ")" + first);
}

void q_learning() {
    const auto start = std::chrono::steady_clock::now();
    const testing::ToyMdp mdp;
    const LearningConfig cfg;  // alpha 0.1, gamma 0.9, epsilon 0.1
    const auto q = mdp.optimal_q(cfg.gamma_d);

    RewardTable table(cfg);
    for (const char* s : testing::ToyMdp::kStates) {
        for (const char* a : testing::ToyMdp::kActions) table.set(s, a, 0.0);
    }
    const std::vector<std::string> actions{"stay", "switch"};
    Rng rng(42);
    std::size_t s = 0;
    int converged_at = -1;
    double error = 0.0;
    for (int i = 1; i <= 100000; ++i) {
        const std::string& chosen = table.epsilon_greedy(testing::ToyMdp::kStates[s], actions, rng);
        const std::size_t a = chosen == actions[0] ? 0 : 1;
        const std::size_t s2 = testing::ToyMdp::next_state(s, a);
        table.q_update(testing::ToyMdp::kStates[s], chosen, mdp.reward[s][a], testing::ToyMdp::kStates[s2]);
        s = s2;
        error = 0.0;
        for (std::size_t x = 0; x < 2; ++x) {
            for (std::size_t y = 0; y < 2; ++y) {
                error = std::max(error, std::abs(table.value(testing::ToyMdp::kStates[x], actions[y]) - q[x][y]));
            }
        }
        if (error < 1e-3 && converged_at < 0) converged_at = i;
        if (error >= 1e-3) converged_at = -1;
    }
    const bool policy = table.greedy("s0", actions) == "switch" && table.greedy("s1", actions) == "stay";
    const double t = seconds_since(start);
    report(7, "q-learning", policy && converged_at > 0 && error < 1e-3 && t < 5.0,
           "greedy policy " + std::string(policy ? "matches" : "differs from") +
               " value iteration, error " + fmt("%.2g", error) + " (below 1e-3 from update " +
               std::to_string(converged_at) + "), " + fmt("%.2f s", t));
}

void crit_checks() {
    Rng rng(1618);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        std::vector<crit::ReasonScore> sup(1 + uniform_below(rng, 6));
        std::vector<crit::ReasonScore> riv(uniform_below(rng, 5));
        std::vector<std::pair<double, double>> so;
        std::vector<std::pair<double, double>> ro;
        for (auto& x : sup) {
            x = {1 + 9 * uniform01(rng), 1 + 9 * uniform01(rng)};
            so.emplace_back(x.gamma, x.theta);
        }
        for (auto& x : riv) {
            x = {1 + 9 * uniform01(rng), 1 + 9 * uniform01(rng)};
            ro.emplace_back(x.gamma, x.theta);
        }
        const double lambda = 2.0 * uniform01(rng);
        worst = std::max(worst, std::abs(crit::aggregate(sup, riv, lambda) - testing::aggregate_oracle(so, ro, lambda)));
    }

    crit::Document who{"who", "World Health Organization", "Vaccines remain effective against variants.",
                       {crit::Reason{"Validity of argument"}}, {}};
    crit::Fixture f;
    f.scores[{"Validity of argument", who.claim}] = {8, 9};
    auto stub = crit::validate_stub(f);
    const double who_score = crit::evaluate(who, crit::DocumentStore{}, stub, 3).score;

    int monotone_failures = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<crit::ReasonScore> sup(1 + uniform_below(rng, 5));
        std::vector<crit::ReasonScore> riv(1 + uniform_below(rng, 4));
        for (auto& x : sup) x = {1 + 9 * uniform01(rng), 1 + 9 * uniform01(rng)};
        for (auto& x : riv) x = {1 + 9 * uniform01(rng), 1 + 9 * uniform01(rng)};
        const double base = crit::aggregate(sup, riv);
        auto sup_up = sup;
        auto& g = sup_up[uniform_below(rng, sup_up.size())].gamma;
        g = std::min(10.0, g + 9 * uniform01(rng));
        auto riv_up = riv;
        auto& rg = riv_up[uniform_below(rng, riv_up.size())].gamma;
        rg = std::min(10.0, rg + 9 * uniform01(rng));
        monotone_failures += crit::aggregate(sup_up, riv) < base;
        monotone_failures += crit::aggregate(sup, riv_up) > base;
    }
    report(8, "crit", worst < 1e-12 && who_score == 8.0 && monotone_failures == 0,
           "aggregate error " + fmt("%.3g", worst) + " over 500 sets, WHO case " + fmt("%.17g", who_score) + ", " +
               std::to_string(monotone_failures) + " monotonicity failures in 1000 perturbations");
}

void deadlock() {
    std::vector<TaskId> cycle;
    try {
        (void)run(load_scenario(kData / "deadlock.json"));
    } catch (const DeadlockDetected& d) {
        cycle = d.cycle();
        g_traces.push_back({"deadlock-partial", d.partial_trace(), 550});
    }
    const fs::path out = fs::temp_directory_path() / "cocomo_acceptance";
    fs::create_directories(out);
    const std::string cmd = std::string("'") + COCOMO_CLI_PATH + "' simulate '" + (kData / "deadlock.json").string() +
                            "' --trace '" + (out / "t.jsonl").string() + "' --metrics '" + (out / "m.json").string() +
                            "' 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    const int code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    fs::remove_all(out);
    std::string text = "[";
    for (std::size_t i = 0; i < cycle.size(); ++i) text += (i ? ", " : "") + std::to_string(cycle[i]);
    text += "]";
    report(9, "deadlock", cycle == std::vector<TaskId>{1, 2} && code == 2,
           "cycle " + text + ", cli exit code " + std::to_string(code));
}

void ordering_and_conservation() {
    int dispatches = 0;
    int priority = 0;
    int conservation = 0;
    std::string first;
    for (const auto& c : g_traces) {
        const auto audit = audit_trace(c.trace, c.bound);
        dispatches += audit.dispatches;
        priority += audit.priority_violations;
        conservation += audit.conservation_violations;
        if (first.empty() && !audit.messages.empty() &&
            (audit.priority_violations || audit.conservation_violations)) {
            first = "; " + c.name + ": " + audit.messages.front();
        }
    }
    report(2, "priority ordering", priority == 0,
           std::to_string(priority) + " violations in " + std::to_string(dispatches) + " dispatches across " +
               std::to_string(g_traces.size()) + " traces" + first);
    report(10, "conservation", conservation == 0 && g_ticks.failures == 0,
           std::to_string(g_ticks.ticks) + " observed ticks, " + std::to_string(g_ticks.failures) +
               " tick failures, " + std::to_string(conservation) + " trace replay failures" +
               (g_ticks.first.empty() ? first : "; " + g_ticks.first));
}

}  // namespace

int main() {
    try {
        determinism();
        starvation();
        energy_oracle();
        interrupt_semantics();
        fading();
        q_learning();
        crit_checks();
        deadlock();
        ordering_and_conservation();
    } catch (const std::exception& e) {
        for (const auto& [n, line] : g_lines) std::printf("%s\n", line.c_str());
        std::printf("[FAIL] acceptance aborted: %s\n", e.what());
        return 1;
    }
    for (const auto& [n, line] : g_lines) std::printf("%s\n", line.c_str());
    std::printf("%s: %d criteria failed\n", g_failed ? "FAIL" : "PASS", g_failed);
    return g_failed ? 1 : 0;
}
