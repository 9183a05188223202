#include "cocomo/simulator.hpp"

#include <map>

#include "cocomo/error.hpp"
#include "cocomo/sync.hpp"

namespace cocomo {

namespace {

struct ActionCursor {
    std::vector<SyncAction> actions;  // ordered by at_work, then script order
    std::size_t next = 0;
};

// Performs the attended task's actions due at its current progress. Returns
// false if the task blocked.
bool perform_due_actions(Scheduler& sched, TaskId id, ActionCursor& cursor) {
    const Tick progress = sched.task(id).progress();
    while (cursor.next < cursor.actions.size() && cursor.actions[cursor.next].at_work == progress) {
        const SyncAction& a = cursor.actions[cursor.next++];
        switch (a.op) {
        case SyncOp::Acquire:
            if (acquire(sched, id, a.resource) == SyncOutcome::Blocked) {
                return false;
            }
            break;
        case SyncOp::Release:
            release(sched, id, a.resource);
            break;
        case SyncOp::Arrive:
            if (arrive(sched, id, a.resource) == SyncOutcome::Blocked) {
                return false;
            }
            break;
        }
    }
    return true;
}

}  // namespace

RunResult run(const Scenario& scenario, const RunOptions& options) {
    scenario.validate();

    RewardTable table(scenario.learning);
    for (const auto& v : scenario.initial_values) {
        table.set(v.context, v.class_tag, v.value);
    }
    Scheduler sched(scenario.config, std::move(table), options.seed.value_or(scenario.seed));
    sched.set_context(scenario.context);
    for (const auto& s : scenario.semaphores) {
        sched.sync().declare_semaphore(s.id, s.permits);
    }
    for (const auto& b : scenario.barriers) {
        sched.sync().declare_barrier(b.id, b.parties);
    }

    std::map<TaskId, const TaskSpec*> specs;
    std::map<TaskId, ActionCursor> cursors;
    for (const auto& spec : scenario.tasks) {
        specs[spec.id] = &spec;
        sched.admit(Task::make(spec.id, spec.class_tag, spec.work), spec.initial_level);
    }
    for (const auto& a : scenario.sync_script) {
        cursors[a.task].actions.push_back(a);
    }
    for (auto& [_, c] : cursors) {
        std::stable_sort(c.actions.begin(), c.actions.end(),
                         [](const SyncAction& x, const SyncAction& y) { return x.at_work < y.at_work; });
    }

    std::multimap<Tick, StimulusEvent> feedback;
    std::size_t next_stimulus = 0;
    std::size_t next_reward = 0;
    const auto& stimuli = scenario.stimuli;
    const auto& rewards = scenario.reward_events;

    if (options.observer) {
        options.observer(sched);
    }

    try {
        while (sched.clock() < scenario.horizon) {
            const Tick now = sched.clock();

            // Receptors: rewards first so a same-tick interrupt sees them.
            while (next_reward < rewards.size() && rewards[next_reward].time <= now) {
                sched.observe(rewards[next_reward++].event);
            }
            while (next_stimulus < stimuli.size() && stimuli[next_stimulus].time <= now) {
                StimulusEvent s = stimuli[next_stimulus++];
                s.time = now;
                sched.stimulate(s);
            }
            for (auto it = feedback.begin(); it != feedback.end() && it->first <= now;) {
                sched.stimulate(it->second);
                it = feedback.erase(it);
            }

            // Fill the attended slot; a task that blocks on its first action
            // hands the slot to the next one.
            while (true) {
                if (!sched.attended() && !sched.next()) {
                    break;
                }
                const TaskId id = *sched.attended();
                auto cursor = cursors.find(id);
                if (cursor == cursors.end() || perform_due_actions(sched, id, cursor->second)) {
                    break;
                }
            }

            const bool quiet = !sched.attended() && !sched.has_ready() &&
                               next_stimulus == stimuli.size() && next_reward == rewards.size() &&
                               feedback.empty();
            if (quiet) {
                break;
            }

            for (const auto& rec : sched.run_tick()) {
                if (rec.kind != TraceKind::Complete || !rec.task) {
                    continue;
                }
                const auto& spec = *specs.at(*rec.task);
                if (!spec.feedback) {
                    continue;
                }
                // Effector output re-enters as a stimulus on the next tick.
                const Tick at = rec.t + 1;
                feedback.emplace(at, StimulusEvent{at, spec.feedback->target,
                                                   spec.feedback->intensity, spec.feedback->novel});
                sched.record(TraceKind::Feedback, rec.task,
                             {{"target", std::int64_t{spec.feedback->target}},
                              {"intensity", spec.feedback->intensity},
                              {"deliver_at", std::int64_t{at}}});
            }

            if (options.observer) {
                options.observer(sched);
            }
        }
    } catch (DeadlockDetected& deadlock) {
        deadlock.set_partial_trace(sched.take_trace());
        throw;
    }

    RunResult result;
    result.final_clock = sched.clock();
    result.trace = sched.take_trace();
    result.metrics = metrics_of(result.trace, {scenario.config.starvation_bound()});
    return result;
}

}  // namespace cocomo
