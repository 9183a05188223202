#include "cocomo/reward_io.hpp"

#include <nlohmann/json.hpp>

#include "cocomo/error.hpp"

namespace cocomo {

std::string to_json(const RewardTable& table) {
    using oj = nlohmann::ordered_json;
    const auto& cfg = table.config();
    oj j;
    j["alpha"] = cfg.alpha;
    j["gamma_d"] = cfg.gamma_d;
    j["epsilon"] = cfg.epsilon;
    j["v_min"] = cfg.v_min;
    j["v_max"] = cfg.v_max;
    oj values = oj::array();
    for (const auto& [key, value] : table.values()) {
        values.push_back({{"context", key.first}, {"class_tag", key.second}, {"value", value}});
    }
    j["values"] = std::move(values);
    return j.dump(2);
}

std::vector<RewardEvent> parse_reward_stream(std::string_view text) {
    std::vector<RewardEvent> events;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            continue;
        }
        const auto fail = [&](const std::string& what) {
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": " + what);
        };
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            fail(e.what());
        }
        if (!j.is_object()) {
            fail("expected a JSON object");
        }
        RewardEvent ev;
        if (j.contains("context")) {
            if (!j["context"].is_string()) {
                fail("context must be a string");
            }
            ev.context = j["context"].get<std::string>();
        }
        if (!j.contains("class_tag") || !j["class_tag"].is_string()) {
            fail("class_tag must be a string");
        }
        ev.class_tag = j["class_tag"].get<std::string>();
        if (!j.contains("reward") || !j["reward"].is_number()) {
            fail("reward must be a number");
        }
        ev.reward = j["reward"].get<double>();
        ev.next_context = ev.context;
        if (j.contains("next_context")) {
            if (!j["next_context"].is_string()) {
                fail("next_context must be a string");
            }
            ev.next_context = j["next_context"].get<std::string>();
        }
        events.push_back(std::move(ev));
    }
    return events;
}

RewardTable learn(RewardTable table, const std::vector<RewardEvent>& events) {
    for (const auto& ev : events) {
        table.q_update(ev.context, ev.class_tag, ev.reward, ev.next_context);
    }
    return table;
}

}  // namespace cocomo
