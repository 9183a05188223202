#pragma once

#include <functional>
#include <optional>

#include "cocomo/metrics.hpp"
#include "cocomo/scenario.hpp"
#include "cocomo/scheduler.hpp"
#include "cocomo/trace.hpp"

namespace cocomo {

struct RunOptions {
    std::optional<std::uint64_t> seed;  // overrides Scenario::seed
    /// Called once before the first tick and after every tick.
    std::function<void(const Scheduler&)> observer;
};

struct RunResult {
    Trace trace;
    Metrics metrics;
    Tick final_clock = 0;
};

/// Runs the scenario until the horizon or until nothing can happen any more.
///
/// Each tick: reward events, then scripted stimuli, then due feedback
/// stimuli are delivered; the attended slot is filled and the attended
/// task's sync actions for its current progress are performed; then one tick
/// of work runs. A completed task with feedback schedules its stimulus for
/// the following tick. Throws DeadlockDetected carrying the partial trace.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

}  // namespace cocomo
