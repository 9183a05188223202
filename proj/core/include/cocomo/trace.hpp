#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cocomo/common.hpp"

namespace cocomo {

enum class TraceKind {
    Admit,
    Interrupt,
    Dispatch,
    QuantumEnd,
    Preempt,
    Fade,
    Block,
    Unblock,
    Complete,
    Age,
    Reprioritize,
    Reward,
    Feedback,
};

std::string_view to_string(TraceKind kind) noexcept;
std::optional<TraceKind> trace_kind_from(std::string_view name) noexcept;

using DetailValue = std::variant<std::int64_t, double, std::string, bool>;
using Detail = std::map<std::string, DetailValue>;

struct TraceRecord {
    Tick t = 0;
    TraceKind kind = TraceKind::Admit;
    std::optional<TaskId> task;
    Detail detail;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;

    [[nodiscard]] std::optional<std::int64_t> int_field(const std::string& key) const;
    [[nodiscard]] std::optional<double> number_field(const std::string& key) const;
    [[nodiscard]] std::optional<std::string> string_field(const std::string& key) const;
};

using Trace = std::vector<TraceRecord>;

/// One record as a single JSON object with keys in the order t, kind, task,
/// detail (detail keys sorted). No trailing newline.
std::string to_json_line(const TraceRecord& record);

/// JSON Lines: one record per line, each terminated by '\n'.
std::string to_jsonl(const Trace& trace);

/// Inverse of to_jsonl. Blank lines are skipped; anything else that is not a
/// well-formed record, or a record out of time order, throws MalformedTrace.
Trace parse_jsonl(std::string_view text);

}  // namespace cocomo
