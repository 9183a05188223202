#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cocomo/crit.hpp"
#include "cocomo/crit_io.hpp"
#include "cocomo/error.hpp"
#include "cocomo/metrics.hpp"
#include "cocomo/reward_io.hpp"
#include "cocomo/scenario.hpp"
#include "cocomo/simulator.hpp"
#include "cocomo/sync.hpp"

namespace cocomo::cli {

namespace {

namespace fs = std::filesystem;

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel log_level() {
    const char* env = std::getenv("COCOMO_LOG");
    if (!env) {
        return LogLevel::Warn;
    }
    const std::string v(env);
    if (v == "error") return LogLevel::Error;
    if (v == "info") return LogLevel::Info;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
}

class Log {
public:
    explicit Log(std::ostream& err) : err_(err), level_(log_level()) {}

    void error(const std::string& msg) const { write(LogLevel::Error, "error", msg); }
    void info(const std::string& msg) const { write(LogLevel::Info, "info", msg); }
    void debug(const std::string& msg) const { write(LogLevel::Debug, "debug", msg); }

private:
    void write(LogLevel at, const char* tag, const std::string& msg) const {
        if (at <= level_) {
            err_ << "cocomo: " << tag << ": " << msg << '\n';
        }
    }

    std::ostream& err_;
    LogLevel level_;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::Io, "cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::Io, "cannot write " + path.string());
    }
    out << content;
}

std::string cycle_text(const std::vector<TaskId>& cycle) {
    std::string s = "[";
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        s += (i ? ", " : "") + std::to_string(cycle[i]);
    }
    return s + "]";
}

struct SimulateArgs {
    std::string scenario;
    std::string trace_out;
    std::string metrics_out;
    std::optional<std::uint64_t> seed;
};

// Returns the exit code for one scenario; diagnostics are collected in `diag`.
int simulate_one(const fs::path& scenario_path, const fs::path& trace_out,
                 const fs::path& metrics_out, std::optional<std::uint64_t> seed,
                 std::string& diag) {
    Scenario sc;
    try {
        sc = load_scenario(scenario_path);
    } catch (const Error& e) {
        diag = scenario_path.string() + ": " + e.what();
        return 1;
    }
    try {
        RunOptions opts;
        opts.seed = seed;
        const auto result = run(sc, opts);
        write_file(trace_out, to_jsonl(result.trace));
        write_file(metrics_out, to_json(result.metrics) + "\n");
        return 0;
    } catch (const DeadlockDetected& d) {
        write_file(trace_out, to_jsonl(d.partial_trace()));
        diag = scenario_path.string() + ": deadlock, cycle " + cycle_text(d.cycle());
        return 2;
    } catch (const Error& e) {
        diag = scenario_path.string() + ": " + e.what();
        return 1;
    }
}

int do_simulate(const SimulateArgs& args, const Log& log) {
    const fs::path input(args.scenario);
    if (!fs::exists(input)) {
        log.error("scenario not found: " + args.scenario);
        return 1;
    }
    if (!fs::is_directory(input)) {
        std::string diag;
        const int code = simulate_one(input, args.trace_out, args.metrics_out, args.seed, diag);
        if (code != 0) {
            log.error(diag);
        } else {
            log.info("wrote " + args.trace_out + " and " + args.metrics_out);
        }
        return code;
    }

    // Batch mode: independent runs in parallel, outputs named after each scenario.
    std::vector<fs::path> scenarios;
    for (const auto& entry : fs::directory_iterator(input)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            scenarios.push_back(entry.path());
        }
    }
    std::sort(scenarios.begin(), scenarios.end());
    std::vector<std::future<std::pair<int, std::string>>> jobs;
    for (const auto& path : scenarios) {
        const fs::path trace = fs::path(args.trace_out) / (path.stem().string() + ".jsonl");
        const fs::path metrics = fs::path(args.metrics_out) / (path.stem().string() + ".metrics.json");
        jobs.push_back(std::async(std::launch::async, [=, seed = args.seed] {
            std::string diag;
            const int code = simulate_one(path, trace, metrics, seed, diag);
            return std::make_pair(code, diag);
        }));
    }
    int worst = 0;
    for (auto& job : jobs) {
        auto [code, diag] = job.get();
        if (code != 0) {
            log.error(diag);
        }
        worst = std::max(worst, code);
    }
    log.info("ran " + std::to_string(scenarios.size()) + " scenarios");
    return worst;
}

struct MetricsArgs {
    std::string trace;
    std::string out;
    std::string scenario;
    std::optional<Tick> bound;
};

int do_metrics(const MetricsArgs& args, const Log& log, std::ostream& out) {
    try {
        MetricsOptions opts;
        if (!args.scenario.empty()) {
            opts.starvation_bound = load_scenario(args.scenario).config.starvation_bound();
        }
        if (args.bound) {
            opts.starvation_bound = *args.bound;
        }
        const auto metrics = metrics_of(parse_jsonl(read_file(args.trace)), opts);
        const auto text = to_json(metrics) + "\n";
        if (args.out.empty()) {
            out << text;
        } else {
            write_file(args.out, text);
        }
        return 0;
    } catch (const Error& e) {
        log.error(e.what());
        return 1;
    }
}

struct LearnArgs {
    std::string events;
    std::string out;
    LearningConfig config;
};

int do_learn(const LearnArgs& args, const Log& log, std::ostream& out) {
    try {
        RewardTable table(args.config);
        const auto events = parse_reward_stream(read_file(args.events));
        table = learn(std::move(table), events);
        const auto text = to_json(table) + "\n";
        if (args.out.empty()) {
            out << text;
        } else {
            write_file(args.out, text);
        }
        log.info("folded " + std::to_string(events.size()) + " reward records");
        return 0;
    } catch (const Error& e) {
        log.error(args.events + ": " + e.what());
        return 1;
    }
}

struct CritArgs {
    std::string document;
    std::string fixtures;
    std::string evaluator_cmd;
    int depth = 3;
    double lambda = 1.0;
};

int do_crit(const CritArgs& args, const Log& log, std::ostream& out) {
    try {
        const auto docs = crit::load_documents(args.document);
        std::unique_ptr<crit::Evaluator> evaluator;
        if (!args.fixtures.empty()) {
            evaluator = std::make_unique<crit::StubEvaluator>(crit::load_fixture(args.fixtures));
        } else {
            evaluator = std::make_unique<crit::ProcessEvaluator>(args.evaluator_cmd);
        }
        const auto report = crit::evaluate(docs.store.find(docs.root), docs.store, *evaluator,
                                           args.depth, args.lambda);
        out << crit::to_json(report) << '\n';
        return 0;
    } catch (const Error& e) {
        log.error(e.what());
        return 1;
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    const Log log(err);
    CLI::App app{"cocomo: consciousness-inspired scheduling simulator and CRIT scorer"};
    app.require_subcommand(1);
    std::string format = "json";

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run a scenario (or a directory of scenarios)");
    simulate->add_option("scenario", sim.scenario, "Scenario JSON file or directory")->required();
    simulate->add_option("--trace", sim.trace_out, "Trace output (JSON Lines), or directory in batch mode")
        ->required();
    simulate->add_option("--metrics", sim.metrics_out, "Metrics output (JSON), or directory in batch mode")
        ->required();
    simulate->add_option("--seed", sim.seed, "Override the scenario seed");
    simulate->add_option("--format", format, "Output format")->check(CLI::IsMember({"json"}));

    MetricsArgs met;
    auto* metrics = app.add_subcommand("metrics", "Recompute metrics from a persisted trace");
    metrics->add_option("trace", met.trace, "Trace file (JSON Lines)")->required();
    metrics->add_option("--out", met.out, "Metrics output; standard output when omitted");
    metrics->add_option("--scenario", met.scenario, "Scenario whose config sets the starvation bound");
    metrics->add_option("--starvation-bound", met.bound, "Explicit starvation bound in ticks");
    metrics->add_option("--format", format, "Output format")->check(CLI::IsMember({"json"}));

    LearnArgs lrn;
    auto* learn_cmd = app.add_subcommand("learn", "Fold reward records into a reward table");
    learn_cmd->add_option("events", lrn.events, "Newline-delimited reward records")->required();
    learn_cmd->add_option("--out", lrn.out, "Reward table output; standard output when omitted");
    learn_cmd->add_option("--alpha", lrn.config.alpha, "Learning rate");
    learn_cmd->add_option("--gamma", lrn.config.gamma_d, "Discount factor");
    learn_cmd->add_option("--epsilon", lrn.config.epsilon, "Exploration rate");
    learn_cmd->add_option("--v-min", lrn.config.v_min, "Lower clamp for priority mapping");
    learn_cmd->add_option("--v-max", lrn.config.v_max, "Upper clamp for priority mapping");
    learn_cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"json"}));

    CritArgs crt;
    auto* crit_cmd = app.add_subcommand("crit", "Score a document with the CRIT recursion");
    crit_cmd->add_option("document", crt.document, "Document JSON")->required();
    auto* fixtures = crit_cmd->add_option("--fixtures", crt.fixtures, "Evaluator fixture JSON");
    auto* command = crit_cmd->add_option("--evaluator-cmd", crt.evaluator_cmd,
                                         "External evaluator command (line protocol)");
    fixtures->excludes(command);
    crit_cmd->add_option("--depth", crt.depth, "Recursion depth limit")->check(CLI::NonNegativeNumber);
    crit_cmd->add_option("--lambda", crt.lambda, "Rival weight")->check(CLI::NonNegativeNumber);
    crit_cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        log.error(e.what());
        return 1;
    }

    if (*simulate) {
        return do_simulate(sim, log);
    }
    if (*metrics) {
        return do_metrics(met, log, out);
    }
    if (*learn_cmd) {
        if (!std::filesystem::exists(lrn.events)) {
            log.error("reward records not found: " + lrn.events);
            return 1;
        }
        return do_learn(lrn, log, out);
    }
    if (crt.fixtures.empty() && crt.evaluator_cmd.empty()) {
        log.error("crit needs --fixtures or --evaluator-cmd");
        return 1;
    }
    if (!std::filesystem::exists(crt.document)) {
        log.error("document not found: " + crt.document);
        return 1;
    }
    return do_crit(crt, log, out);
}

}  // namespace cocomo::cli
