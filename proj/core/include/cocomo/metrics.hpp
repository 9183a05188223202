#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "cocomo/common.hpp"
#include "cocomo/trace.hpp"

namespace cocomo {

struct ResponseStats {
    std::int64_t samples = 0;
    double mean = 0.0;
    Tick max = 0;

    friend bool operator==(const ResponseStats&, const ResponseStats&) = default;
};

struct Metrics {
    /// Interrupt to first dispatch, per class tag.
    std::map<std::string, ResponseStats> response;
    /// Attended ticks per class tag (every admitted class appears).
    std::map<std::string, Tick> class_service;
    /// Fraction of attended ticks spent at each dispatch level.
    std::map<int, double> level_share;
    /// Ready periods longer than the starvation bound.
    std::int64_t starvation_events = 0;
    /// Interrupt-to-preemption latency (ticks) -> occurrences.
    std::map<Tick, std::int64_t> preemption_latency;
    /// Jain's index over per-class service, in (0, 1].
    double fairness = 1.0;
    Tick service_ticks = 0;

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct MetricsOptions {
    Tick starvation_bound = 550;
};

/// Pure fold over a time-ordered trace. Throws MalformedTrace on records that
/// do not describe a consistent schedule.
Metrics metrics_of(const Trace& trace, const MetricsOptions& options = {});

std::string to_json(const Metrics& metrics);

}  // namespace cocomo
