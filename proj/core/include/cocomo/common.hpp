#pragma once

#include <cstdint>
#include <string>

namespace cocomo {

/// Logical time. One tick is the smallest unit of scheduled work.
using Tick = std::int64_t;
using TaskId = std::int64_t;
using ResourceId = std::string;

/// Level value carried by tasks that sit in the unconscious pool.
inline constexpr int kUnconsciousLevel = -1;

/// A receptor signal aimed at one task.
struct StimulusEvent {
    Tick time = 0;
    TaskId target = 0;
    double intensity = 0.0;
    bool novel = false;

    friend bool operator==(const StimulusEvent&, const StimulusEvent&) = default;
};

}  // namespace cocomo
