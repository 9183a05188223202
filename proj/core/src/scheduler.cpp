#include "cocomo/scheduler.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "cocomo/error.hpp"

namespace cocomo {

void SchedulerConfig::validate() const {
    if (levels < 1) {
        throw Error(Errc::InvalidConfig, "levels must be at least 1");
    }
    if (quanta.size() != static_cast<std::size_t>(levels)) {
        throw Error(Errc::InvalidConfig, "quanta must list one quantum per level");
    }
    for (std::size_t i = 0; i < quanta.size(); ++i) {
        if (quanta[i] <= 0) {
            throw Error(Errc::InvalidConfig, "quanta must be positive");
        }
        if (i > 0 && quanta[i] < quanta[i - 1]) {
            throw Error(Errc::InvalidConfig,
                        "quanta must be non-decreasing from the highest-priority level");
        }
    }
    if (aging_period <= 0) {
        throw Error(Errc::InvalidConfig, "aging_period must be positive");
    }
    attention.validate();
}

Tick SchedulerConfig::starvation_bound() const noexcept {
    return static_cast<Tick>(levels) * aging_period +
           std::accumulate(quanta.begin(), quanta.end(), Tick{0});
}

Scheduler::Scheduler(SchedulerConfig config, RewardTable rewards, std::uint64_t seed)
    : config_(std::move(config)), rewards_(std::move(rewards)), rng_(seed) {
    config_.validate();
    rewards_.config().validate();
    queues_.resize(static_cast<std::size_t>(config_.levels));
}

const std::deque<TaskId>& Scheduler::queue(int level) const {
    return queues_.at(static_cast<std::size_t>(level));
}

const Task& Scheduler::task(TaskId id) const {
    auto it = tasks_.find(id);
    if (it == tasks_.end()) {
        throw Error(Errc::UnknownTask, "task " + std::to_string(id));
    }
    return it->second;
}

Task& Scheduler::mutable_task(TaskId id) {
    auto it = tasks_.find(id);
    if (it == tasks_.end()) {
        throw Error(Errc::UnknownTask, "task " + std::to_string(id));
    }
    return it->second;
}

bool Scheduler::has_ready() const noexcept {
    return std::any_of(queues_.begin(), queues_.end(), [](const auto& q) { return !q.empty(); });
}

void Scheduler::emit(TraceKind kind, std::optional<TaskId> task, Detail detail) {
    trace_.push_back(TraceRecord{clock_, kind, task, std::move(detail)});
}

void Scheduler::enqueue(Task& task) {
    queues_[static_cast<std::size_t>(task.level)].push_back(task.id);
}

void Scheduler::remove_from_queue(TaskId id, int level) {
    auto& q = queues_[static_cast<std::size_t>(level)];
    q.erase(std::remove(q.begin(), q.end(), id), q.end());
}

void Scheduler::admit(Task task, std::optional<int> initial_level) {
    if (tasks_.contains(task.id)) {
        throw Error(Errc::DuplicateTask, "task " + std::to_string(task.id));
    }
    if (task.work <= 0) {
        throw Error(Errc::ValidationError,
                    "task " + std::to_string(task.id) + " must carry positive work");
    }
    const TaskId id = task.id;
    task.phase = Phase::Unconscious;
    task.level = kUnconsciousLevel;
    task.energy = Energy{0.0, clock_};
    task.remaining_work = task.work;

    Detail detail{{"class_tag", task.class_tag}, {"work", std::int64_t{task.work}}};
    if (initial_level) {
        const int level = std::clamp(*initial_level, 0, config_.lowest_level());
        task = transition(std::move(task), events::AwarenessInterrupt{level});
        task.energy = Energy{config_.attention.wake_threshold, clock_};
        detail["initial_level"] = std::int64_t{level};
    }
    auto& stored = tasks_.emplace(id, std::move(task)).first->second;
    if (stored.phase == Phase::Ready) {
        enqueue(stored);
    } else {
        pool_.insert(id);
    }
    emit(TraceKind::Admit, id, std::move(detail));
}

StimulusOutcome Scheduler::stimulate(const StimulusEvent& stimulus) {
    Task& t = mutable_task(stimulus.target);
    switch (t.phase) {
    case Phase::Completed:
        return StimulusOutcome::Ignored;
    case Phase::Blocked: {
        // Energy is frozen while blocked; only the new input is added.
        Energy frozen = t.energy;
        frozen.last_update = std::max(frozen.last_update, stimulus.time);
        t.energy = accumulate(frozen, stimulus, config_.attention).energy;
        return StimulusOutcome::Absorbed;
    }
    case Phase::Unconscious: {
        const auto acc = accumulate(t.energy, stimulus, config_.attention);
        t.energy = acc.energy;
        if (acc.crossed_up) {
            on_awareness_interrupt(t.id);
            return StimulusOutcome::Interrupted;
        }
        return StimulusOutcome::Absorbed;
    }
    case Phase::Ready:
    case Phase::Attended: {
        const auto acc = accumulate(t.energy, stimulus, config_.attention);
        t.energy = acc.energy;
        if (acc.crossed_up && stimulus.novel) {
            reprioritize();
            return StimulusOutcome::Reprioritized;
        }
        return StimulusOutcome::Absorbed;
    }
    }
    return StimulusOutcome::Absorbed;
}

void Scheduler::on_awareness_interrupt(TaskId id) {
    if (!pool_.contains(id)) {
        throw Error(Errc::NotUnconscious, "task " + std::to_string(id) + " is not in the pool");
    }
    Task& t = mutable_task(id);

    // Declared random choice: one draw per interrupt, a second when exploring.
    int level = rewards_.priority_for(t.class_tag, context_, config_.levels);
    bool explored = false;
    if (uniform01(rng_) < rewards_.config().epsilon) {
        level = static_cast<int>(uniform_below(rng_, static_cast<std::uint64_t>(config_.levels)));
        explored = true;
    }

    pool_.erase(id);
    t = transition(std::move(t), events::AwarenessInterrupt{level});
    queues_[static_cast<std::size_t>(level)].push_back(id);
    emit(TraceKind::Interrupt, id,
         {{"level", std::int64_t{level}},
          {"energy", t.energy.value},
          {"explored", explored}});

    rebuild_queues(id);

    if (attended_) {
        Task& running = mutable_task(*attended_);
        if (level < running.level) {
            const TaskId victim = running.id;
            running = transition(std::move(running), events::Preempt{});
            attended_.reset();
            enqueue(running);
            emit(TraceKind::Preempt, victim,
                 {{"level", std::int64_t{running.level}},
                  {"quantum_left", std::int64_t{running.quantum_left}},
                  {"by", std::int64_t{id}}});
        }
    }
}

void Scheduler::reprioritize() { rebuild_queues(std::nullopt); }

void Scheduler::rebuild_queues(std::optional<TaskId> pinned) {
    const auto target_level = [&](const Task& t) {
        const int base = rewards_.priority_for(t.class_tag, context_, config_.levels);
        const auto credit = static_cast<int>(
            std::min<Tick>(t.wait_ticks / config_.aging_period, config_.levels));
        return std::max(0, base - credit);
    };
    const auto relevel = [&](Task& t, int level) {
        if (t.level != level) {
            emit(TraceKind::Reprioritize, t.id,
                 {{"from", std::int64_t{t.level}}, {"to", std::int64_t{level}}});
            t.level = level;
        }
        if (t.quantum_left > config_.quantum(level)) {
            t.quantum_left = config_.quantum(level);
        }
    };

    std::vector<std::tuple<int, Tick, TaskId>> order;
    for (auto& q : queues_) {
        for (TaskId id : q) {
            Task& t = tasks_.at(id);
            relevel(t, pinned == id ? t.level : target_level(t));
            order.emplace_back(t.level, -t.wait_ticks, id);
        }
        q.clear();
    }
    std::sort(order.begin(), order.end());
    for (const auto& [level, neg_wait, id] : order) {
        queues_[static_cast<std::size_t>(level)].push_back(id);
    }
    if (attended_) {
        Task& running = tasks_.at(*attended_);
        relevel(running, target_level(running));
    }
}

std::optional<TaskId> Scheduler::next() {
    if (attended_) {
        throw Error(Errc::AlreadyAttending, "task " + std::to_string(*attended_));
    }
    for (auto& q : queues_) {
        if (q.empty()) {
            continue;
        }
        const TaskId id = q.front();
        q.pop_front();
        Task& t = tasks_.at(id);
        const Tick full = config_.quantum(t.level);
        const Tick quantum = t.quantum_left > 0 ? std::min(t.quantum_left, full) : full;
        if (last_dispatched_ != id) {
            t.consecutive_quanta = 0;
        }
        t = transition(std::move(t), events::Dispatch{quantum});
        // Attention sustains energy while the task runs.
        t.energy = Energy{config_.attention.wake_threshold, clock_};
        attended_ = id;
        last_dispatched_ = id;
        emit(TraceKind::Dispatch, id,
             {{"level", std::int64_t{t.level}}, {"quantum", std::int64_t{quantum}}});
        return id;
    }
    return std::nullopt;
}

void Scheduler::complete_attended() {
    Task& t = tasks_.at(*attended_);
    const TaskId id = t.id;
    t = transition(std::move(t), events::Complete{});
    attended_.reset();
    emit(TraceKind::Complete, id);
    // Whatever the task still holds goes back to its semaphores.
    const std::vector<ResourceId> held(t.held_resources.begin(), t.held_resources.end());
    for (const auto& r : held) {
        release(*this, id, r);
    }
}

std::vector<TraceRecord> Scheduler::run_tick() {
    const std::size_t first = trace_.size();
    std::vector<TaskId> waiting;
    for (const auto& q : queues_) {
        waiting.insert(waiting.end(), q.begin(), q.end());
    }

    ++clock_;

    if (attended_) {
        Task& t = tasks_.at(*attended_);
        --t.remaining_work;
        --t.quantum_left;
        if (t.remaining_work == 0) {
            complete_attended();
        } else if (t.quantum_left == 0) {
            // A task holding permits stays conscious so its waiters can progress.
            const bool fade = t.level == config_.lowest_level() && t.held_resources.empty() &&
                              should_fade(t.energy, config_.attention, clock_);
            const TaskId id = t.id;
            if (fade) {
                t.energy = decay(t.energy, clock_, config_.attention.tau);
                t = transition(std::move(t), events::Fade{});
                attended_.reset();
                pool_.insert(id);
                emit(TraceKind::Fade, id, {{"energy", t.energy.value}});
            } else {
                t = transition(std::move(t), events::QuantumEnd{config_.lowest_level()});
                attended_.reset();
                enqueue(t);
                emit(TraceKind::QuantumEnd, id,
                     {{"level", std::int64_t{t.level}},
                      {"consecutive_quanta", std::int64_t{t.consecutive_quanta}}});
                if (config_.attention.beta > 0.0) {
                    RewardEvent boredom{context_, t.class_tag,
                                        boredom_penalty(t.consecutive_quanta,
                                                        config_.attention.beta),
                                        context_};
                    trace_.push_back(cocomo::observe(rewards_, boredom, clock_, id));
                }
            }
        }
    }

    for (TaskId id : waiting) {
        Task& t = tasks_.at(id);
        if (t.phase != Phase::Ready) {
            continue;
        }
        ++t.wait_ticks;
        if (t.level > 0 && t.wait_ticks % config_.aging_period == 0) {
            remove_from_queue(id, t.level);
            const int from = t.level;
            --t.level;
            if (t.quantum_left > config_.quantum(t.level)) {
                t.quantum_left = config_.quantum(t.level);
            }
            enqueue(t);
            emit(TraceKind::Age, id, {{"from", std::int64_t{from}}, {"to", std::int64_t{t.level}}});
        }
    }

    return {trace_.begin() + static_cast<std::ptrdiff_t>(first), trace_.end()};
}

void Scheduler::observe(const RewardEvent& event) {
    trace_.push_back(cocomo::observe(rewards_, event, clock_));
    context_ = event.next_context;
}

void Scheduler::block_attended(const ResourceId& resource) {
    if (!attended_) {
        throw Error(Errc::NotAttending, "no attended task to block");
    }
    Task& t = tasks_.at(*attended_);
    t.energy = decay(t.energy, clock_, config_.attention.tau);
    t = transition(std::move(t), events::Block{resource});
    emit(TraceKind::Block, t.id, {{"resource", resource}});
    attended_.reset();
}

void Scheduler::unblock(TaskId id, const ResourceId& resource) {
    Task& t = mutable_task(id);
    t = transition(std::move(t), events::Unblock{});
    t.energy.last_update = std::max(t.energy.last_update, clock_);
    enqueue(t);
    emit(TraceKind::Unblock, id,
         {{"level", std::int64_t{t.level}}, {"resource", resource}});
}

std::vector<TaskId> Scheduler::resident_ids() const {
    std::vector<TaskId> ids(pool_.begin(), pool_.end());
    for (const auto& q : queues_) {
        ids.insert(ids.end(), q.begin(), q.end());
    }
    if (attended_) {
        ids.push_back(*attended_);
    }
    for (const auto& [_, sem] : sync_.semaphores) {
        ids.insert(ids.end(), sem.wait_queue.begin(), sem.wait_queue.end());
    }
    for (const auto& [_, bar] : sync_.barriers) {
        ids.insert(ids.end(), bar.gate.wait_queue.begin(), bar.gate.wait_queue.end());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::optional<std::string> Scheduler::check_invariants() const {
    std::vector<TaskId> live;
    for (const auto& [id, t] : tasks_) {
        if (t.phase != Phase::Completed) {
            live.push_back(id);
        }
    }
    if (resident_ids() != live) {
        return "task ids are lost or duplicated across scheduler containers";
    }
    for (TaskId id : pool_) {
        const Task& t = tasks_.at(id);
        if (t.phase != Phase::Unconscious || t.level != kUnconsciousLevel) {
            return "pool holds task " + std::to_string(id) + " that is not unconscious";
        }
    }
    for (std::size_t level = 0; level < queues_.size(); ++level) {
        for (TaskId id : queues_[level]) {
            const Task& t = tasks_.at(id);
            if (t.phase != Phase::Ready || t.level != static_cast<int>(level)) {
                return "queue " + std::to_string(level) + " holds task " + std::to_string(id) +
                       " in the wrong state";
            }
        }
    }
    std::size_t attended_count = 0;
    for (const auto& [id, t] : tasks_) {
        if (t.phase == Phase::Attended) {
            ++attended_count;
            if (attended_ != id) {
                return "task " + std::to_string(id) + " is attended outside the attended slot";
            }
            if (t.quantum_left > config_.quantum(t.level)) {
                return "attended task " + std::to_string(id) + " exceeds its level quantum";
            }
        }
        if ((t.remaining_work == 0) != (t.phase == Phase::Completed)) {
            return "task " + std::to_string(id) + " has remaining work inconsistent with its state";
        }
    }
    if (attended_count > 1) {
        return "more than one task is attended";
    }
    for (const auto& [_, sem] : sync_.semaphores) {
        if (sem.permits > 0 && !sem.wait_queue.empty()) {
            return "semaphore " + sem.id + " has free permits and waiters";
        }
        for (TaskId id : sem.wait_queue) {
            if (tasks_.at(id).phase != Phase::Blocked) {
                return "semaphore " + sem.id + " waits on non-blocked task " + std::to_string(id);
            }
        }
    }
    for (const auto& [_, bar] : sync_.barriers) {
        if (static_cast<int>(bar.arrived.size()) >= bar.parties) {
            return "barrier " + bar.id + " holds a full party without releasing";
        }
    }
    return std::nullopt;
}

}  // namespace cocomo
