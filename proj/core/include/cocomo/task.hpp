#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>

#include "cocomo/attention.hpp"
#include "cocomo/common.hpp"

namespace cocomo {

enum class Phase { Unconscious, Ready, Attended, Blocked, Completed };

std::string_view to_string(Phase phase) noexcept;

struct Task {
    TaskId id = 0;
    std::string class_tag;
    Phase phase = Phase::Unconscious;
    int level = kUnconsciousLevel;
    Energy energy;
    Tick work = 0;
    Tick remaining_work = 0;
    Tick quantum_left = 0;
    Tick wait_ticks = 0;
    long long consecutive_quanta = 0;
    std::multiset<ResourceId> held_resources;
    std::optional<ResourceId> blocked_on;

    static Task make(TaskId id, std::string class_tag, Tick work);

    [[nodiscard]] Tick progress() const noexcept { return work - remaining_work; }
    [[nodiscard]] bool conscious() const noexcept {
        return phase == Phase::Ready || phase == Phase::Attended || phase == Phase::Blocked;
    }
};

namespace events {
struct AwarenessInterrupt { int level = 0; };
struct Dispatch { Tick quantum = 0; };
struct QuantumEnd { int lowest_level = 0; };
struct Preempt {};
struct Fade {};
struct Block { ResourceId resource; };
struct Unblock {};
struct Complete {};
}  // namespace events

using TransitionEvent =
    std::variant<events::AwarenessInterrupt, events::Dispatch, events::QuantumEnd,
                 events::Preempt, events::Fade, events::Block, events::Unblock,
                 events::Complete>;

std::string_view event_name(const TransitionEvent& event) noexcept;

/// Applies one edge of the consciousness state machine:
///
///   Unconscious --AwarenessInterrupt--> Ready(level)
///   Ready       --Dispatch-----------> Attended
///   Attended    --QuantumEnd---------> Ready(level + 1, clamped)
///   Attended    --Preempt------------> Ready(same level, quantum kept)
///   Attended    --Fade---------------> Unconscious
///   Attended    --Block(r)-----------> Blocked(r)
///   Blocked     --Unblock------------> Ready(prior level)
///   Attended    --Complete-----------> Completed
///
/// Any other pair throws IllegalTransition.
[[nodiscard]] Task transition(Task task, const TransitionEvent& event);

/// Whether `transition(task, event)` would succeed.
[[nodiscard]] bool is_legal(Phase phase, const TransitionEvent& event) noexcept;

}  // namespace cocomo
