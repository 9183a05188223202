#pragma once

#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "cocomo/common.hpp"
#include "cocomo/error.hpp"
#include "cocomo/trace.hpp"

namespace cocomo {

class Scheduler;

/// Counting semaphore. A lock is a semaphore with one permit.
struct Semaphore {
    ResourceId id;
    long long permits = 0;
    std::deque<TaskId> wait_queue;
};

/// Reusable barrier built on a zero-permit gate semaphore: early arrivals
/// block on the gate and the last arrival opens it for everyone.
struct Barrier {
    ResourceId id;
    int parties = 1;
    std::vector<TaskId> arrived;
    Semaphore gate;
};

struct SyncState {
    std::map<ResourceId, Semaphore> semaphores;
    std::map<ResourceId, Barrier> barriers;

    void declare_semaphore(const ResourceId& id, long long permits);
    void declare_barrier(const ResourceId& id, int parties);
    [[nodiscard]] bool knows(const ResourceId& id) const;
};

/// Raised when an acquire closes a cycle in the wait-for graph.
class DeadlockDetected : public Error {
public:
    explicit DeadlockDetected(std::vector<TaskId> cycle);

    [[nodiscard]] const std::vector<TaskId>& cycle() const noexcept { return cycle_; }
    [[nodiscard]] const Trace& partial_trace() const noexcept { return partial_; }
    void set_partial_trace(Trace trace) { partial_ = std::move(trace); }

private:
    std::vector<TaskId> cycle_;
    Trace partial_;
};

enum class SyncOutcome { Proceed, Blocked };

/// The attended task takes one permit, or blocks in FIFO order on the
/// semaphore. Throws DeadlockDetected when blocking closes a wait-for cycle.
SyncOutcome acquire(Scheduler& sched, TaskId task, const ResourceId& sem);

/// Hands the permit to the head waiter (which becomes Ready holding it), or
/// returns it to the pool. Releasing without holding is allowed. Returns the
/// woken task, if any.
std::optional<TaskId> release(Scheduler& sched, TaskId task, const ResourceId& sem);

/// Barrier arrival by the attended task. The last of `parties` arrivals
/// wakes every waiter and proceeds; earlier ones block.
SyncOutcome arrive(Scheduler& sched, TaskId task, const ResourceId& barrier);

/// Cycle in the wait-for graph (blocked task -> holders of the semaphore it
/// waits on), found by a DFS visiting ids in ascending order. The cycle is
/// rotated to start at its smallest id.
std::optional<std::vector<TaskId>> detect_deadlock(const Scheduler& sched);

}  // namespace cocomo
