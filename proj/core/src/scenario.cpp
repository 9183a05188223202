#include "cocomo/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "cocomo/error.hpp"

namespace cocomo {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
    throw Error(Errc::ParseError, path + ": " + what);
}

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::ValidationError, what); }

const json* member(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

std::int64_t get_int(const json& j, const char* key, const std::string& path,
                     std::optional<std::int64_t> fallback = std::nullopt) {
    const json* v = member(j, key);
    if (!v) {
        if (fallback) {
            return *fallback;
        }
        field_error(path + "." + key, "required integer is missing");
    }
    if (!v->is_number_integer()) {
        field_error(path + "." + key, "expected an integer");
    }
    return v->get<std::int64_t>();
}

double get_number(const json& j, const char* key, const std::string& path,
                  std::optional<double> fallback = std::nullopt) {
    const json* v = member(j, key);
    if (!v) {
        if (fallback) {
            return *fallback;
        }
        field_error(path + "." + key, "required number is missing");
    }
    if (!v->is_number()) {
        field_error(path + "." + key, "expected a number");
    }
    return v->get<double>();
}

std::string get_string(const json& j, const char* key, const std::string& path,
                       std::optional<std::string> fallback = std::nullopt) {
    const json* v = member(j, key);
    if (!v) {
        if (fallback) {
            return *fallback;
        }
        field_error(path + "." + key, "required string is missing");
    }
    if (!v->is_string()) {
        field_error(path + "." + key, "expected a string");
    }
    return v->get<std::string>();
}

bool get_bool(const json& j, const char* key, const std::string& path, bool fallback) {
    const json* v = member(j, key);
    if (!v) {
        return fallback;
    }
    if (!v->is_boolean()) {
        field_error(path + "." + key, "expected a boolean");
    }
    return v->get<bool>();
}

const json& get_array(const json& j, const char* key, const std::string& path) {
    static const json empty = json::array();
    const json* v = member(j, key);
    if (!v) {
        return empty;
    }
    if (!v->is_array()) {
        field_error(path + "." + key, "expected an array");
    }
    return *v;
}

std::string at(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) {
        field_error(path, "expected an object");
    }
}

SchedulerConfig parse_config(const json& j, LearningConfig& learning,
                             std::vector<InitialValue>& initial) {
    SchedulerConfig cfg;
    require_object(j, "config");
    cfg.levels = static_cast<int>(get_int(j, "levels", "config", cfg.levels));
    if (const json* q = member(j, "quanta")) {
        if (!q->is_array()) {
            field_error("config.quanta", "expected an array");
        }
        cfg.quanta.clear();
        for (std::size_t i = 0; i < q->size(); ++i) {
            if (!(*q)[i].is_number_integer()) {
                field_error(at("config.quanta", i), "expected an integer");
            }
            cfg.quanta.push_back((*q)[i].get<Tick>());
        }
    } else if (cfg.levels != 4) {
        // Geometric doubling from 10 when only the level count is given.
        cfg.quanta.clear();
        for (int i = 0; i < cfg.levels; ++i) {
            cfg.quanta.push_back(Tick{10} << std::min(i, 40));
        }
    }
    cfg.aging_period = get_int(j, "aging_period", "config", cfg.aging_period);
    if (const json* a = member(j, "attention")) {
        require_object(*a, "config.attention");
        auto& att = cfg.attention;
        att.tau = get_number(*a, "tau", "config.attention", att.tau);
        att.wake_threshold = get_number(*a, "wake_threshold", "config.attention", att.wake_threshold);
        att.fade_threshold = get_number(*a, "fade_threshold", "config.attention", att.fade_threshold);
        att.beta = get_number(*a, "beta", "config.attention", att.beta);
    }
    if (const json* l = member(j, "learning")) {
        require_object(*l, "config.learning");
        learning.alpha = get_number(*l, "alpha", "config.learning", learning.alpha);
        learning.gamma_d = get_number(*l, "gamma_d", "config.learning", learning.gamma_d);
        learning.epsilon = get_number(*l, "epsilon", "config.learning", learning.epsilon);
        learning.v_min = get_number(*l, "v_min", "config.learning", learning.v_min);
        learning.v_max = get_number(*l, "v_max", "config.learning", learning.v_max);
        const auto& init = get_array(*l, "initial_values", "config.learning");
        for (std::size_t i = 0; i < init.size(); ++i) {
            const auto path = at("config.learning.initial_values", i);
            require_object(init[i], path);
            initial.push_back({get_string(init[i], "context", path, "default"),
                               get_string(init[i], "class_tag", path),
                               get_number(init[i], "value", path)});
        }
    }
    return cfg;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        line += text[i] == '\n';
    }
    return line;
}

}  // namespace

void Scenario::validate() const {
    try {
        config.validate();
        learning.validate();
    } catch (const Error& e) {
        invalid(e.what());
    }
    if (horizon <= 0) {
        invalid("horizon must be positive");
    }

    std::map<TaskId, const TaskSpec*> by_id;
    for (const auto& t : tasks) {
        if (!by_id.emplace(t.id, &t).second) {
            invalid("task id " + std::to_string(t.id) + " declared twice");
        }
        if (t.work <= 0) {
            invalid("task " + std::to_string(t.id) + " must have positive work");
        }
        if (t.initial_level && (*t.initial_level < 0 || *t.initial_level >= config.levels)) {
            invalid("task " + std::to_string(t.id) + " initial_level outside [0, levels)");
        }
    }
    for (const auto& t : tasks) {
        if (t.feedback) {
            if (!by_id.contains(t.feedback->target)) {
                invalid("task " + std::to_string(t.id) + " feedback targets undeclared task " +
                        std::to_string(t.feedback->target));
            }
            if (!(t.feedback->intensity >= 0.0)) {
                invalid("task " + std::to_string(t.id) + " feedback intensity must be non-negative");
            }
        }
    }

    Tick last = 0;
    for (std::size_t i = 0; i < stimuli.size(); ++i) {
        const auto& s = stimuli[i];
        if (s.time < last) {
            invalid("stimuli are not sorted by time (entry " + std::to_string(i) + ")");
        }
        last = s.time;
        if (s.time < 0) {
            invalid("stimulus " + std::to_string(i) + " has negative time");
        }
        if (!(s.intensity >= 0.0)) {
            invalid("stimulus " + std::to_string(i) + " has negative intensity");
        }
        if (!by_id.contains(s.target)) {
            invalid("stimulus " + std::to_string(i) + " targets undeclared task " +
                    std::to_string(s.target));
        }
    }
    last = 0;
    for (std::size_t i = 0; i < reward_events.size(); ++i) {
        const auto& r = reward_events[i];
        if (r.time < last) {
            invalid("reward_events are not sorted by time (entry " + std::to_string(i) + ")");
        }
        last = r.time;
        if (r.time < 0) {
            invalid("reward event " + std::to_string(i) + " has negative time");
        }
        if (!std::isfinite(r.event.reward)) {
            invalid("reward event " + std::to_string(i) + " has a non-finite reward");
        }
    }

    std::set<ResourceId> sems;
    std::set<ResourceId> bars;
    for (const auto& s : semaphores) {
        if (!sems.insert(s.id).second || s.permits < 0) {
            invalid("semaphore '" + s.id + "' is duplicated or has negative permits");
        }
    }
    for (const auto& b : barriers) {
        if (sems.contains(b.id) || !bars.insert(b.id).second || b.parties < 1) {
            invalid("barrier '" + b.id + "' is duplicated or has no parties");
        }
    }
    for (std::size_t i = 0; i < sync_script.size(); ++i) {
        const auto& a = sync_script[i];
        auto it = by_id.find(a.task);
        if (it == by_id.end()) {
            invalid("sync_script[" + std::to_string(i) + "] names undeclared task " +
                    std::to_string(a.task));
        }
        if (a.at_work < 0 || a.at_work >= it->second->work) {
            invalid("sync_script[" + std::to_string(i) + "] at_work must lie in [0, work)");
        }
        const bool want_barrier = a.op == SyncOp::Arrive;
        if (want_barrier ? !bars.contains(a.resource) : !sems.contains(a.resource)) {
            invalid("sync_script[" + std::to_string(i) + "] references undeclared " +
                    (want_barrier ? "barrier '" : "semaphore '") + a.resource + "'");
        }
    }
}

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::ParseError, "line " + std::to_string(line_of(text, e.byte)) + ": " +
                                          e.what());
    }
    require_object(j, "scenario");

    Scenario sc;
    if (const json* c = member(j, "config")) {
        sc.config = parse_config(*c, sc.learning, sc.initial_values);
    }
    if (const json* s = member(j, "seed")) {
        if (!s->is_number_integer() || (s->is_number_integer() && !s->is_number_unsigned() &&
                                        s->get<std::int64_t>() < 0)) {
            field_error("seed", "expected an unsigned integer");
        }
        sc.seed = s->get<std::uint64_t>();
    }
    sc.context = get_string(j, "context", "scenario", "default");
    sc.horizon = get_int(j, "horizon", "scenario", sc.horizon);

    const auto& tasks = get_array(j, "tasks", "scenario");
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto path = at("tasks", i);
        const auto& t = tasks[i];
        require_object(t, path);
        TaskSpec spec;
        spec.id = get_int(t, "id", path);
        spec.class_tag = get_string(t, "class_tag", path, "default");
        spec.work = get_int(t, "work", path);
        if (member(t, "initial_level")) {
            spec.initial_level = static_cast<int>(get_int(t, "initial_level", path));
        }
        if (const json* f = member(t, "feedback")) {
            require_object(*f, path + ".feedback");
            spec.feedback = FeedbackSpec{get_int(*f, "target", path + ".feedback"),
                                         get_number(*f, "intensity", path + ".feedback"),
                                         get_bool(*f, "novel", path + ".feedback", false)};
        }
        sc.tasks.push_back(std::move(spec));
    }

    const auto& stimuli = get_array(j, "stimuli", "scenario");
    for (std::size_t i = 0; i < stimuli.size(); ++i) {
        const auto path = at("stimuli", i);
        require_object(stimuli[i], path);
        sc.stimuli.push_back({get_int(stimuli[i], "time", path), get_int(stimuli[i], "target", path),
                              get_number(stimuli[i], "intensity", path),
                              get_bool(stimuli[i], "novel", path, false)});
    }

    const auto& rewards = get_array(j, "reward_events", "scenario");
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        const auto path = at("reward_events", i);
        const auto& r = rewards[i];
        require_object(r, path);
        TimedReward tr;
        tr.time = get_int(r, "time", path);
        tr.event.context = get_string(r, "context", path, "default");
        tr.event.class_tag = get_string(r, "class_tag", path);
        tr.event.reward = get_number(r, "reward", path);
        tr.event.next_context = get_string(r, "next_context", path, tr.event.context);
        sc.reward_events.push_back(std::move(tr));
    }

    const auto& sems = get_array(j, "semaphores", "scenario");
    for (std::size_t i = 0; i < sems.size(); ++i) {
        const auto path = at("semaphores", i);
        require_object(sems[i], path);
        sc.semaphores.push_back({get_string(sems[i], "id", path), get_int(sems[i], "permits", path, 1)});
    }
    const auto& bars = get_array(j, "barriers", "scenario");
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const auto path = at("barriers", i);
        require_object(bars[i], path);
        sc.barriers.push_back(
            {get_string(bars[i], "id", path), static_cast<int>(get_int(bars[i], "parties", path))});
    }

    const auto& script = get_array(j, "sync_script", "scenario");
    for (std::size_t i = 0; i < script.size(); ++i) {
        const auto path = at("sync_script", i);
        const auto& a = script[i];
        require_object(a, path);
        SyncAction action;
        action.task = get_int(a, "task", path);
        action.at_work = get_int(a, "at_work", path);
        const auto op = get_string(a, "op", path);
        if (op == "acquire") {
            action.op = SyncOp::Acquire;
        } else if (op == "release") {
            action.op = SyncOp::Release;
        } else if (op == "arrive") {
            action.op = SyncOp::Arrive;
        } else {
            field_error(path + ".op", "expected acquire, release or arrive, got '" + op + "'");
        }
        action.resource = get_string(a, "resource", path);
        sc.sync_script.push_back(std::move(action));
    }

    sc.validate();
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::Io, "cannot open scenario " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string to_json(const Scenario& sc) {
    using oj = nlohmann::ordered_json;
    oj j;
    oj cfg;
    cfg["levels"] = sc.config.levels;
    cfg["quanta"] = sc.config.quanta;
    cfg["aging_period"] = sc.config.aging_period;
    cfg["attention"] = {{"tau", sc.config.attention.tau},
                        {"wake_threshold", sc.config.attention.wake_threshold},
                        {"fade_threshold", sc.config.attention.fade_threshold},
                        {"beta", sc.config.attention.beta}};
    oj learning = {{"alpha", sc.learning.alpha},
                   {"gamma_d", sc.learning.gamma_d},
                   {"epsilon", sc.learning.epsilon},
                   {"v_min", sc.learning.v_min},
                   {"v_max", sc.learning.v_max}};
    oj init = oj::array();
    for (const auto& v : sc.initial_values) {
        init.push_back({{"context", v.context}, {"class_tag", v.class_tag}, {"value", v.value}});
    }
    learning["initial_values"] = std::move(init);
    cfg["learning"] = std::move(learning);
    j["config"] = std::move(cfg);
    j["seed"] = sc.seed;
    j["context"] = sc.context;
    j["horizon"] = sc.horizon;

    oj tasks = oj::array();
    for (const auto& t : sc.tasks) {
        oj o = {{"id", t.id}, {"class_tag", t.class_tag}, {"work", t.work}};
        if (t.initial_level) {
            o["initial_level"] = *t.initial_level;
        }
        if (t.feedback) {
            o["feedback"] = {{"target", t.feedback->target},
                             {"intensity", t.feedback->intensity},
                             {"novel", t.feedback->novel}};
        }
        tasks.push_back(std::move(o));
    }
    j["tasks"] = std::move(tasks);

    oj stimuli = oj::array();
    for (const auto& s : sc.stimuli) {
        stimuli.push_back(
            {{"time", s.time}, {"target", s.target}, {"intensity", s.intensity}, {"novel", s.novel}});
    }
    j["stimuli"] = std::move(stimuli);

    oj rewards = oj::array();
    for (const auto& r : sc.reward_events) {
        rewards.push_back({{"time", r.time},
                           {"context", r.event.context},
                           {"class_tag", r.event.class_tag},
                           {"reward", r.event.reward},
                           {"next_context", r.event.next_context}});
    }
    j["reward_events"] = std::move(rewards);

    oj sems = oj::array();
    for (const auto& s : sc.semaphores) {
        sems.push_back({{"id", s.id}, {"permits", s.permits}});
    }
    j["semaphores"] = std::move(sems);
    oj bars = oj::array();
    for (const auto& b : sc.barriers) {
        bars.push_back({{"id", b.id}, {"parties", b.parties}});
    }
    j["barriers"] = std::move(bars);

    oj script = oj::array();
    for (const auto& a : sc.sync_script) {
        const char* op = a.op == SyncOp::Acquire ? "acquire" : a.op == SyncOp::Release ? "release" : "arrive";
        script.push_back({{"task", a.task}, {"at_work", a.at_work}, {"op", op}, {"resource", a.resource}});
    }
    j["sync_script"] = std::move(script);
    return j.dump(2);
}

}  // namespace cocomo
