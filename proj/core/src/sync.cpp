#include "cocomo/sync.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "cocomo/scheduler.hpp"

namespace cocomo {

namespace {

std::string describe(const std::vector<TaskId>& cycle) {
    std::string s = "wait-for cycle [";
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        s += (i ? ", " : "") + std::to_string(cycle[i]);
    }
    return s + "]";
}

}  // namespace

void SyncState::declare_semaphore(const ResourceId& id, long long permits) {
    if (knows(id)) {
        throw Error(Errc::ValidationError, "resource '" + id + "' declared twice");
    }
    if (permits < 0) {
        throw Error(Errc::ValidationError, "semaphore '" + id + "' has negative permits");
    }
    semaphores.emplace(id, Semaphore{id, permits, {}});
}

void SyncState::declare_barrier(const ResourceId& id, int parties) {
    if (knows(id)) {
        throw Error(Errc::ValidationError, "resource '" + id + "' declared twice");
    }
    if (parties < 1) {
        throw Error(Errc::ValidationError, "barrier '" + id + "' needs at least one party");
    }
    barriers.emplace(id, Barrier{id, parties, {}, Semaphore{id, 0, {}}});
}

bool SyncState::knows(const ResourceId& id) const {
    return semaphores.contains(id) || barriers.contains(id);
}

DeadlockDetected::DeadlockDetected(std::vector<TaskId> cycle)
    : Error(Errc::DeadlockDetected, describe(cycle)), cycle_(std::move(cycle)) {}

SyncOutcome acquire(Scheduler& sched, TaskId task, const ResourceId& sem_id) {
    auto it = sched.sync_.semaphores.find(sem_id);
    if (it == sched.sync_.semaphores.end()) {
        throw Error(Errc::UnknownSemaphore, "'" + sem_id + "'");
    }
    if (sched.attended_ != task) {
        throw Error(Errc::NotAttending,
                    "task " + std::to_string(task) + " must be attended to acquire '" + sem_id + "'");
    }
    Semaphore& sem = it->second;
    if (sem.permits > 0) {
        --sem.permits;
        sched.mutable_task(task).held_resources.insert(sem_id);
        return SyncOutcome::Proceed;
    }
    sem.wait_queue.push_back(task);
    sched.block_attended(sem_id);
    if (auto cycle = detect_deadlock(sched)) {
        throw DeadlockDetected(std::move(*cycle));
    }
    return SyncOutcome::Blocked;
}

std::optional<TaskId> release(Scheduler& sched, TaskId task, const ResourceId& sem_id) {
    auto it = sched.sync_.semaphores.find(sem_id);
    if (it == sched.sync_.semaphores.end()) {
        throw Error(Errc::UnknownSemaphore, "'" + sem_id + "'");
    }
    Semaphore& sem = it->second;
    if (auto t = sched.tasks_.find(task); t != sched.tasks_.end()) {
        auto& held = t->second.held_resources;
        if (auto h = held.find(sem_id); h != held.end()) {
            held.erase(h);
        }
    }
    if (sem.wait_queue.empty()) {
        ++sem.permits;
        return std::nullopt;
    }
    const TaskId woken = sem.wait_queue.front();
    sem.wait_queue.pop_front();
    sched.mutable_task(woken).held_resources.insert(sem_id);
    sched.unblock(woken, sem_id);
    return woken;
}

SyncOutcome arrive(Scheduler& sched, TaskId task, const ResourceId& barrier_id) {
    auto it = sched.sync_.barriers.find(barrier_id);
    if (it == sched.sync_.barriers.end()) {
        throw Error(Errc::UnknownSemaphore, "barrier '" + barrier_id + "'");
    }
    if (sched.attended_ != task) {
        throw Error(Errc::NotAttending, "task " + std::to_string(task) +
                                            " must be attended to arrive at '" + barrier_id + "'");
    }
    Barrier& bar = it->second;
    if (static_cast<int>(bar.arrived.size()) + 1 < bar.parties) {
        bar.arrived.push_back(task);
        bar.gate.wait_queue.push_back(task);
        sched.block_attended(barrier_id);
        return SyncOutcome::Blocked;
    }
    while (!bar.gate.wait_queue.empty()) {
        const TaskId woken = bar.gate.wait_queue.front();
        bar.gate.wait_queue.pop_front();
        sched.unblock(woken, barrier_id);
    }
    bar.arrived.clear();
    return SyncOutcome::Proceed;
}

std::optional<std::vector<TaskId>> detect_deadlock(const Scheduler& sched) {
    // Blocked task -> tasks holding the semaphore it waits for.
    std::map<TaskId, std::set<TaskId>> edges;
    for (const auto& [id, t] : sched.tasks()) {
        if (t.phase != Phase::Blocked || !t.blocked_on ||
            !sched.sync().semaphores.contains(*t.blocked_on)) {
            continue;
        }
        auto& out = edges[id];
        for (const auto& [other, holder] : sched.tasks()) {
            if (other != id && holder.held_resources.contains(*t.blocked_on)) {
                out.insert(other);
            }
        }
    }

    enum class Mark { White, Gray, Black };
    std::map<TaskId, Mark> mark;
    std::vector<TaskId> path;
    std::optional<std::vector<TaskId>> found;

    std::function<void(TaskId)> visit = [&](TaskId node) {
        mark[node] = Mark::Gray;
        path.push_back(node);
        if (auto e = edges.find(node); e != edges.end()) {
            for (TaskId next : e->second) {
                if (found) {
                    return;
                }
                const Mark m = mark.contains(next) ? mark[next] : Mark::White;
                if (m == Mark::Gray) {
                    auto start = std::find(path.begin(), path.end(), next);
                    std::vector<TaskId> cycle(start, path.end());
                    std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()),
                                cycle.end());
                    found = std::move(cycle);
                    return;
                }
                if (m == Mark::White) {
                    visit(next);
                }
            }
        }
        path.pop_back();
        mark[node] = Mark::Black;
    };

    for (const auto& [node, _] : edges) {
        if (found) {
            break;
        }
        if (!mark.contains(node)) {
            visit(node);
        }
    }
    return found;
}

}  // namespace cocomo
