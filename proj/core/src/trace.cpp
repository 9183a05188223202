#include "cocomo/trace.hpp"

#include <array>
#include <nlohmann/json.hpp>

#include "cocomo/error.hpp"

namespace cocomo {

namespace {

constexpr std::array<std::pair<TraceKind, std::string_view>, 13> kKindNames{{
    {TraceKind::Admit, "Admit"},
    {TraceKind::Interrupt, "Interrupt"},
    {TraceKind::Dispatch, "Dispatch"},
    {TraceKind::QuantumEnd, "QuantumEnd"},
    {TraceKind::Preempt, "Preempt"},
    {TraceKind::Fade, "Fade"},
    {TraceKind::Block, "Block"},
    {TraceKind::Unblock, "Unblock"},
    {TraceKind::Complete, "Complete"},
    {TraceKind::Age, "Age"},
    {TraceKind::Reprioritize, "Reprioritize"},
    {TraceKind::Reward, "Reward"},
    {TraceKind::Feedback, "Feedback"},
}};

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
    throw Error(Errc::MalformedTrace, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string_view to_string(TraceKind kind) noexcept {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) {
            return name;
        }
    }
    return "?";
}

std::optional<TraceKind> trace_kind_from(std::string_view name) noexcept {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) {
            return k;
        }
    }
    return std::nullopt;
}

std::optional<std::int64_t> TraceRecord::int_field(const std::string& key) const {
    auto it = detail.find(key);
    if (it == detail.end()) {
        return std::nullopt;
    }
    if (const auto* v = std::get_if<std::int64_t>(&it->second)) {
        return *v;
    }
    return std::nullopt;
}

std::optional<double> TraceRecord::number_field(const std::string& key) const {
    auto it = detail.find(key);
    if (it == detail.end()) {
        return std::nullopt;
    }
    if (const auto* v = std::get_if<double>(&it->second)) {
        return *v;
    }
    if (const auto* v = std::get_if<std::int64_t>(&it->second)) {
        return static_cast<double>(*v);
    }
    return std::nullopt;
}

std::optional<std::string> TraceRecord::string_field(const std::string& key) const {
    auto it = detail.find(key);
    if (it == detail.end()) {
        return std::nullopt;
    }
    if (const auto* v = std::get_if<std::string>(&it->second)) {
        return *v;
    }
    return std::nullopt;
}

std::string to_json_line(const TraceRecord& record) {
    nlohmann::ordered_json j;
    j["t"] = record.t;
    j["kind"] = to_string(record.kind);
    j["task"] = record.task ? nlohmann::ordered_json(*record.task) : nlohmann::ordered_json();
    auto detail = nlohmann::ordered_json::object();
    for (const auto& [key, value] : record.detail) {
        std::visit([&](const auto& v) { detail[key] = v; }, value);
    }
    j["detail"] = std::move(detail);
    return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::strict);
}

std::string to_jsonl(const Trace& trace) {
    std::string out;
    for (const auto& r : trace) {
        out += to_json_line(r);
        out += '\n';
    }
    return out;
}

Trace parse_jsonl(std::string_view text) {
    Trace trace;
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
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            malformed(line_no, e.what());
        }
        if (!j.is_object()) {
            malformed(line_no, "record is not an object");
        }
        TraceRecord r;
        if (!j.contains("t") || !j["t"].is_number_integer()) {
            malformed(line_no, "missing integer field 't'");
        }
        r.t = j["t"].get<Tick>();
        if (!j.contains("kind") || !j["kind"].is_string()) {
            malformed(line_no, "missing string field 'kind'");
        }
        auto kind = trace_kind_from(j["kind"].get<std::string>());
        if (!kind) {
            malformed(line_no, "unknown kind '" + j["kind"].get<std::string>() + "'");
        }
        r.kind = *kind;
        if (j.contains("task") && !j["task"].is_null()) {
            if (!j["task"].is_number_integer()) {
                malformed(line_no, "field 'task' must be an integer or null");
            }
            r.task = j["task"].get<TaskId>();
        }
        if (j.contains("detail")) {
            if (!j["detail"].is_object()) {
                malformed(line_no, "field 'detail' must be an object");
            }
            for (const auto& [key, value] : j["detail"].items()) {
                if (value.is_boolean()) {
                    r.detail[key] = value.get<bool>();
                } else if (value.is_number_integer()) {
                    r.detail[key] = value.get<std::int64_t>();
                } else if (value.is_number_float()) {
                    r.detail[key] = value.get<double>();
                } else if (value.is_string()) {
                    r.detail[key] = value.get<std::string>();
                } else {
                    malformed(line_no, "unsupported detail value for '" + key + "'");
                }
            }
        }
        if (!trace.empty() && r.t < trace.back().t) {
            malformed(line_no, "record time goes backwards");
        }
        trace.push_back(std::move(r));
    }
    return trace;
}

}  // namespace cocomo
