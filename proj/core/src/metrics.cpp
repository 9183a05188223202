#include "cocomo/metrics.hpp"

#include <nlohmann/json.hpp>
#include <optional>

#include "cocomo/error.hpp"

namespace cocomo {

namespace {

[[noreturn]] void malformed(std::size_t index, const std::string& what) {
    throw Error(Errc::MalformedTrace, "record " + std::to_string(index) + ": " + what);
}

struct TaskFold {
    std::string class_tag;
    std::optional<Tick> interrupted_at;  // awaiting first dispatch
    std::optional<Tick> ready_since;
    std::optional<Tick> attended_since;
    int dispatch_level = 0;
    Tick last_interrupt = 0;
};

}  // namespace

Metrics metrics_of(const Trace& trace, const MetricsOptions& options) {
    Metrics m;
    std::map<TaskId, TaskFold> tasks;
    std::map<std::string, std::pair<Tick, std::int64_t>> response_sum;  // class -> (sum, n)
    std::map<int, Tick> level_ticks;
    Tick last_t = 0;

    const auto fold_of = [&](std::size_t i, const TraceRecord& r) -> TaskFold& {
        if (!r.task) {
            malformed(i, std::string(to_string(r.kind)) + " record without a task");
        }
        auto it = tasks.find(*r.task);
        if (it == tasks.end()) {
            malformed(i, "task " + std::to_string(*r.task) + " was never admitted");
        }
        return it->second;
    };
    const auto end_service = [&](std::size_t i, TaskFold& f, Tick t) {
        if (!f.attended_since) {
            malformed(i, "service ends for a task that is not attended");
        }
        const Tick span = t - *f.attended_since;
        m.class_service[f.class_tag] += span;
        level_ticks[f.dispatch_level] += span;
        m.service_ticks += span;
        f.attended_since.reset();
    };
    const auto end_wait = [&](TaskFold& f, Tick t) {
        if (f.ready_since && t - *f.ready_since > options.starvation_bound) {
            ++m.starvation_events;
        }
        f.ready_since.reset();
    };

    for (std::size_t i = 0; i < trace.size(); ++i) {
        const TraceRecord& r = trace[i];
        if (r.t < last_t) {
            malformed(i, "time goes backwards");
        }
        last_t = r.t;

        switch (r.kind) {
        case TraceKind::Admit: {
            if (!r.task) {
                malformed(i, "Admit record without a task");
            }
            auto cls = r.string_field("class_tag");
            if (!cls) {
                malformed(i, "Admit record without class_tag");
            }
            auto [it, fresh] = tasks.emplace(*r.task, TaskFold{*cls, {}, {}, {}, 0, 0});
            if (!fresh) {
                malformed(i, "task " + std::to_string(*r.task) + " admitted twice");
            }
            m.class_service.try_emplace(*cls, 0);
            if (r.int_field("initial_level")) {
                it->second.ready_since = r.t;
            }
            break;
        }
        case TraceKind::Interrupt: {
            auto& f = fold_of(i, r);
            f.interrupted_at = r.t;
            f.last_interrupt = r.t;
            f.ready_since = r.t;
            break;
        }
        case TraceKind::Dispatch: {
            auto& f = fold_of(i, r);
            if (f.attended_since) {
                malformed(i, "task dispatched twice without leaving service");
            }
            auto level = r.int_field("level");
            if (!level) {
                malformed(i, "Dispatch record without level");
            }
            end_wait(f, r.t);
            f.attended_since = r.t;
            f.dispatch_level = static_cast<int>(*level);
            if (f.interrupted_at) {
                const Tick rt = r.t - *f.interrupted_at;
                auto& stats = m.response[f.class_tag];
                auto& [sum, n] = response_sum[f.class_tag];
                sum += rt;
                ++n;
                stats.samples = n;
                stats.max = std::max(stats.max, rt);
                f.interrupted_at.reset();
            }
            break;
        }
        case TraceKind::QuantumEnd:
        case TraceKind::Preempt: {
            auto& f = fold_of(i, r);
            end_service(i, f, r.t);
            f.ready_since = r.t;
            if (r.kind == TraceKind::Preempt) {
                Tick source = r.t;
                if (auto by = r.int_field("by"); by && tasks.contains(*by)) {
                    source = tasks.at(*by).last_interrupt;
                }
                ++m.preemption_latency[r.t - source];
            }
            break;
        }
        case TraceKind::Fade:
        case TraceKind::Block:
        case TraceKind::Complete: {
            auto& f = fold_of(i, r);
            end_service(i, f, r.t);
            break;
        }
        case TraceKind::Unblock: {
            auto& f = fold_of(i, r);
            f.ready_since = r.t;
            break;
        }
        case TraceKind::Age:
        case TraceKind::Reprioritize:
            (void)fold_of(i, r);
            break;
        case TraceKind::Reward:
        case TraceKind::Feedback:
            break;
        }
    }

    for (auto& [id, f] : tasks) {
        if (f.attended_since) {
            end_service(trace.size(), f, last_t);
        }
        end_wait(f, last_t);
    }
    for (auto& [cls, stats] : m.response) {
        const auto& [sum, n] = response_sum[cls];
        stats.mean = static_cast<double>(sum) / static_cast<double>(n);
    }
    if (m.service_ticks > 0) {
        for (const auto& [level, ticks] : level_ticks) {
            m.level_share[level] =
                static_cast<double>(ticks) / static_cast<double>(m.service_ticks);
        }
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& [cls, ticks] : m.class_service) {
        sum += static_cast<double>(ticks);
        sum_sq += static_cast<double>(ticks) * static_cast<double>(ticks);
    }
    m.fairness = sum_sq > 0.0
                     ? sum * sum / (static_cast<double>(m.class_service.size()) * sum_sq)
                     : 1.0;
    return m;
}

std::string to_json(const Metrics& m) {
    using oj = nlohmann::ordered_json;
    oj j;
    oj response = oj::object();
    for (const auto& [cls, s] : m.response) {
        response[cls] = {{"samples", s.samples}, {"mean", s.mean}, {"max", s.max}};
    }
    j["response"] = std::move(response);
    oj service = oj::object();
    for (const auto& [cls, ticks] : m.class_service) {
        service[cls] = ticks;
    }
    j["class_service"] = std::move(service);
    oj share = oj::object();
    for (const auto& [level, s] : m.level_share) {
        share[std::to_string(level)] = s;
    }
    j["level_share"] = std::move(share);
    j["starvation_events"] = m.starvation_events;
    oj latency = oj::object();
    for (const auto& [ticks, count] : m.preemption_latency) {
        latency[std::to_string(ticks)] = count;
    }
    j["preemption_latency"] = std::move(latency);
    j["fairness"] = m.fairness;
    j["service_ticks"] = m.service_ticks;
    return j.dump(2);
}

}  // namespace cocomo
