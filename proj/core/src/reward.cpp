#include "cocomo/reward.hpp"

#include <algorithm>
#include <cmath>

#include "cocomo/error.hpp"

namespace cocomo {

void LearningConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(Errc::InvalidConfig, "learning.alpha must lie in [0, 1]");
    }
    if (!(gamma_d >= 0.0 && gamma_d < 1.0)) {
        throw Error(Errc::InvalidConfig, "learning.gamma_d must lie in [0, 1)");
    }
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw Error(Errc::InvalidConfig, "learning.epsilon must lie in [0, 1]");
    }
    if (!std::isfinite(v_min) || !std::isfinite(v_max) || !(v_min < v_max)) {
        throw Error(Errc::InvalidConfig, "learning.v_min must be below learning.v_max");
    }
}

RewardTable::RewardTable(LearningConfig config) : config_(config) {
    config_.validate();
}

double RewardTable::value(const std::string& context, const std::string& class_tag) const {
    auto it = values_.find(Key{context, class_tag});
    return it == values_.end() ? 0.0 : it->second;
}

void RewardTable::set(const std::string& context, const std::string& class_tag, double value) {
    if (!std::isfinite(value)) {
        throw Error(Errc::NonFiniteReward, "value for (" + context + ", " + class_tag + ")");
    }
    values_[Key{context, class_tag}] = value;
    actions_.insert(class_tag);
}

double RewardTable::max_value(const std::string& context) const {
    if (actions_.empty()) {
        return 0.0;
    }
    double best = -INFINITY;
    for (const auto& a : actions_) {
        best = std::max(best, value(context, a));
    }
    return best;
}

double RewardTable::q_update(const std::string& s, const std::string& a, double r,
                             const std::string& s_next) {
    if (!std::isfinite(r)) {
        throw Error(Errc::NonFiniteReward, "reward for (" + s + ", " + a + ") is not finite");
    }
    // Register the action first so max_a' sees it even when s_next == s.
    actions_.insert(a);
    const double q = value(s, a);
    const double target = r + config_.gamma_d * max_value(s_next);
    const double updated = q + config_.alpha * (target - q);
    values_[Key{s, a}] = updated;
    return updated;
}

int RewardTable::priority_for(const std::string& class_tag, const std::string& context,
                              int levels) const {
    if (levels <= 1) {
        return 0;
    }
    const double v = std::clamp(value(context, class_tag), config_.v_min, config_.v_max);
    const double norm = (v - config_.v_min) / (config_.v_max - config_.v_min);
    const auto level = std::lround((1.0 - norm) * static_cast<double>(levels - 1));
    return static_cast<int>(std::clamp<long>(level, 0, levels - 1));
}

const std::string& RewardTable::greedy(const std::string& context,
                                       std::span<const std::string> candidates) const {
    if (candidates.empty()) {
        throw Error(Errc::InvalidConfig, "greedy selection over an empty action set");
    }
    const std::string* best = &candidates.front();
    double best_value = value(context, *best);
    for (const auto& a : candidates.subspan(1)) {
        const double v = value(context, a);
        if (v > best_value) {
            best = &a;
            best_value = v;
        }
    }
    return *best;
}

const std::string& RewardTable::epsilon_greedy(const std::string& context,
                                               std::span<const std::string> candidates,
                                               Rng& rng) const {
    if (candidates.empty()) {
        throw Error(Errc::InvalidConfig, "epsilon-greedy selection over an empty action set");
    }
    if (uniform01(rng) < config_.epsilon) {
        return candidates[uniform_below(rng, candidates.size())];
    }
    return greedy(context, candidates);
}

TraceRecord observe(RewardTable& table, const RewardEvent& event, Tick t,
                    std::optional<TaskId> task) {
    const double updated =
        table.q_update(event.context, event.class_tag, event.reward, event.next_context);
    TraceRecord rec;
    rec.t = t;
    rec.kind = TraceKind::Reward;
    rec.task = task;
    rec.detail["context"] = event.context;
    rec.detail["class_tag"] = event.class_tag;
    rec.detail["reward"] = event.reward;
    rec.detail["next_context"] = event.next_context;
    rec.detail["value"] = updated;
    return rec;
}

}  // namespace cocomo
