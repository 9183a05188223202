#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cocomo/common.hpp"
#include "cocomo/reward.hpp"
#include "cocomo/scheduler.hpp"

namespace cocomo {

/// Stimulus emitted by the effector when the owning task completes.
struct FeedbackSpec {
    TaskId target = 0;
    double intensity = 0.0;
    bool novel = false;
};

struct TaskSpec {
    TaskId id = 0;
    std::string class_tag;
    Tick work = 1;
    std::optional<int> initial_level;
    std::optional<FeedbackSpec> feedback;
};

struct TimedReward {
    Tick time = 0;
    RewardEvent event;
};

struct SemaphoreDecl {
    ResourceId id;
    long long permits = 1;
};

struct BarrierDecl {
    ResourceId id;
    int parties = 2;
};

enum class SyncOp { Acquire, Release, Arrive };

/// Performed by `task` when it is attended and has done exactly `at_work`
/// ticks of work, before the next tick runs.
struct SyncAction {
    TaskId task = 0;
    Tick at_work = 0;
    SyncOp op = SyncOp::Acquire;
    ResourceId resource;
};

struct InitialValue {
    std::string context = "default";
    std::string class_tag;
    double value = 0.0;
};

struct Scenario {
    SchedulerConfig config;
    LearningConfig learning;
    std::vector<InitialValue> initial_values;
    std::string context = "default";
    std::uint64_t seed = 0;
    std::vector<TaskSpec> tasks;
    std::vector<StimulusEvent> stimuli;
    std::vector<TimedReward> reward_events;
    std::vector<SemaphoreDecl> semaphores;
    std::vector<BarrierDecl> barriers;
    std::vector<SyncAction> sync_script;
    Tick horizon = 1000;

    /// Throws ValidationError naming the first violated invariant.
    void validate() const;
};

/// Throws ParseError (with line/column or field path) or ValidationError.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical JSON rendering accepted by parse_scenario.
std::string to_json(const Scenario& scenario);

}  // namespace cocomo
