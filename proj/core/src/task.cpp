#include "cocomo/task.hpp"

#include <algorithm>
#include <string>

#include "cocomo/error.hpp"

namespace cocomo {

namespace {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

[[noreturn]] void illegal(const Task& task, const TransitionEvent& event) {
    throw Error(Errc::IllegalTransition, "task " + std::to_string(task.id) + ": " +
                                             std::string(to_string(task.phase)) + " on " +
                                             std::string(event_name(event)));
}

}  // namespace

std::string_view to_string(Phase phase) noexcept {
    switch (phase) {
    case Phase::Unconscious: return "Unconscious";
    case Phase::Ready: return "Ready";
    case Phase::Attended: return "Attended";
    case Phase::Blocked: return "Blocked";
    case Phase::Completed: return "Completed";
    }
    return "?";
}

Task Task::make(TaskId id, std::string class_tag, Tick work) {
    Task t;
    t.id = id;
    t.class_tag = std::move(class_tag);
    t.work = work;
    t.remaining_work = work;
    return t;
}

std::string_view event_name(const TransitionEvent& event) noexcept {
    return std::visit(
        overloaded{
            [](const events::AwarenessInterrupt&) { return std::string_view{"AwarenessInterrupt"}; },
            [](const events::Dispatch&) { return std::string_view{"Dispatch"}; },
            [](const events::QuantumEnd&) { return std::string_view{"QuantumEnd"}; },
            [](const events::Preempt&) { return std::string_view{"Preempt"}; },
            [](const events::Fade&) { return std::string_view{"Fade"}; },
            [](const events::Block&) { return std::string_view{"Block"}; },
            [](const events::Unblock&) { return std::string_view{"Unblock"}; },
            [](const events::Complete&) { return std::string_view{"Complete"}; },
        },
        event);
}

bool is_legal(Phase phase, const TransitionEvent& event) noexcept {
    return std::visit(
        overloaded{
            [&](const events::AwarenessInterrupt&) { return phase == Phase::Unconscious; },
            [&](const events::Dispatch&) { return phase == Phase::Ready; },
            [&](const events::Unblock&) { return phase == Phase::Blocked; },
            [&](const auto&) { return phase == Phase::Attended; },
        },
        event);
}

Task transition(Task task, const TransitionEvent& event) {
    if (!is_legal(task.phase, event)) {
        illegal(task, event);
    }
    std::visit(
        overloaded{
            [&](const events::AwarenessInterrupt& e) {
                task.phase = Phase::Ready;
                task.level = std::max(0, e.level);
                task.quantum_left = 0;
                task.wait_ticks = 0;
                task.consecutive_quanta = 0;
            },
            [&](const events::Dispatch& e) {
                task.phase = Phase::Attended;
                task.quantum_left = e.quantum;
                task.wait_ticks = 0;
            },
            [&](const events::QuantumEnd& e) {
                task.phase = Phase::Ready;
                task.level = std::min(task.level + 1, std::max(0, e.lowest_level));
                task.quantum_left = 0;
                ++task.consecutive_quanta;
            },
            [&](const events::Preempt&) { task.phase = Phase::Ready; },
            [&](const events::Fade&) {
                task.phase = Phase::Unconscious;
                task.level = kUnconsciousLevel;
                task.quantum_left = 0;
                task.wait_ticks = 0;
                task.consecutive_quanta = 0;
            },
            [&](const events::Block& e) {
                task.phase = Phase::Blocked;
                task.blocked_on = e.resource;
            },
            [&](const events::Unblock&) {
                task.phase = Phase::Ready;
                task.blocked_on.reset();
            },
            [&](const events::Complete&) {
                task.phase = Phase::Completed;
                task.remaining_work = 0;
                task.quantum_left = 0;
            },
        },
        event);
    return task;
}

}  // namespace cocomo
