#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cocomo/attention.hpp"
#include "cocomo/common.hpp"
#include "cocomo/random.hpp"
#include "cocomo/reward.hpp"
#include "cocomo/sync.hpp"
#include "cocomo/task.hpp"
#include "cocomo/trace.hpp"

namespace cocomo {

struct SchedulerConfig {
    int levels = 4;
    std::vector<Tick> quanta{10, 20, 40, 80};
    Tick aging_period = 100;
    AttentionConfig attention;

    /// Throws InvalidConfig on a malformed level/quantum layout.
    void validate() const;

    [[nodiscard]] int lowest_level() const noexcept { return levels - 1; }
    [[nodiscard]] Tick quantum(int level) const { return quanta.at(static_cast<std::size_t>(level)); }
    /// levels * aging_period + sum(quanta): the longest a Ready task may wait.
    [[nodiscard]] Tick starvation_bound() const noexcept;
};

enum class StimulusOutcome {
    Absorbed,       // energy updated, nothing else happened
    Interrupted,    // an unconscious task crossed the wake threshold
    Reprioritized,  // a novel stimulus pushed a conscious task over the threshold
    Ignored,        // target already completed
};

/// Multi-level feedback queue over conscious tasks plus an unconscious pool.
///
/// Level 0 is the highest priority. Unconscious tasks are never dispatched;
/// an awareness interrupt moves one into a queue chosen from the reward table
/// and re-ranks every conscious task. The scheduler is single-threaded: it
/// may be moved between threads but never used concurrently.
class Scheduler {
public:
    explicit Scheduler(SchedulerConfig config, RewardTable rewards = RewardTable{},
                       std::uint64_t seed = 0);

    /// Parks `task` in the unconscious pool with zero energy, or, with an
    /// initial level, starts it directly in that queue. Throws DuplicateTask.
    void admit(Task task, std::optional<int> initial_level = std::nullopt);

    /// Receptor entry point: accumulates the stimulus into the target's
    /// energy and raises an awareness interrupt on an upward crossing.
    StimulusOutcome stimulate(const StimulusEvent& stimulus);

    /// Quantum jump of a pooled task into the conscious queues, followed by
    /// global re-prioritization and, when the newcomer outranks the attended
    /// task, immediate preemption. Throws NotUnconscious.
    void on_awareness_interrupt(TaskId id);

    /// Recomputes every Ready and Attended task's level from the reward
    /// table (less one level per aging period already waited) and rebuilds
    /// the queues ordered by (level, longest wait, id). Blocked tasks keep
    /// their level.
    void reprioritize();

    /// Dispatches the head of the highest-priority non-empty queue. Throws
    /// AlreadyAttending if a task is attended.
    std::optional<TaskId> next();

    /// Advances the clock one tick and returns the records emitted by it.
    std::vector<TraceRecord> run_tick();

    /// Feeds an external reward into the table; the current context becomes
    /// the event's next_context.
    void observe(const RewardEvent& event);

    void set_context(std::string context) { context_ = std::move(context); }

    /// Appends a record stamped with the current clock; for components
    /// outside the scheduler (effectors) that log into the same trace.
    void record(TraceKind kind, std::optional<TaskId> task, Detail detail = {}) {
        emit(kind, task, std::move(detail));
    }

    [[nodiscard]] Tick clock() const noexcept { return clock_; }
    [[nodiscard]] const SchedulerConfig& config() const noexcept { return config_; }
    [[nodiscard]] const RewardTable& rewards() const noexcept { return rewards_; }
    [[nodiscard]] const std::string& context() const noexcept { return context_; }
    [[nodiscard]] std::optional<TaskId> attended() const noexcept { return attended_; }
    [[nodiscard]] const std::deque<TaskId>& queue(int level) const;
    [[nodiscard]] const std::set<TaskId>& pool() const noexcept { return pool_; }
    [[nodiscard]] const std::map<TaskId, Task>& tasks() const noexcept { return tasks_; }
    [[nodiscard]] const Task& task(TaskId id) const;
    [[nodiscard]] bool has_ready() const noexcept;
    [[nodiscard]] const SyncState& sync() const noexcept { return sync_; }
    SyncState& sync() noexcept { return sync_; }

    [[nodiscard]] const Trace& trace() const noexcept { return trace_; }
    Trace take_trace() { return std::exchange(trace_, {}); }

    /// Ids of every non-completed task as found in the pool, the queues, the
    /// attended slot and the semaphore/barrier wait queues (sorted, with
    /// repeats if a task were present twice).
    [[nodiscard]] std::vector<TaskId> resident_ids() const;

    /// Empty when all structural invariants hold, otherwise a description of
    /// the first violation found.
    [[nodiscard]] std::optional<std::string> check_invariants() const;

private:
    friend SyncOutcome acquire(Scheduler&, TaskId, const ResourceId&);
    friend std::optional<TaskId> release(Scheduler&, TaskId, const ResourceId&);
    friend SyncOutcome arrive(Scheduler&, TaskId, const ResourceId&);

    Task& mutable_task(TaskId id);
    void emit(TraceKind kind, std::optional<TaskId> task, Detail detail = {});
    void enqueue(Task& task);
    void remove_from_queue(TaskId id, int level);
    void block_attended(const ResourceId& resource);
    void unblock(TaskId id, const ResourceId& resource);
    void rebuild_queues(std::optional<TaskId> pinned);
    void complete_attended();

    SchedulerConfig config_;
    RewardTable rewards_;
    Rng rng_;
    std::string context_ = "default";
    Tick clock_ = 0;
    std::map<TaskId, Task> tasks_;
    std::vector<std::deque<TaskId>> queues_;
    std::set<TaskId> pool_;
    std::optional<TaskId> attended_;
    std::optional<TaskId> last_dispatched_;
    SyncState sync_;
    Trace trace_;
};

}  // namespace cocomo
