#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>

#include "cocomo/common.hpp"
#include "cocomo/random.hpp"
#include "cocomo/trace.hpp"

namespace cocomo {

struct LearningConfig {
    double alpha = 0.1;    // learning rate, (0, 1]
    double gamma_d = 0.9;  // discount, [0, 1)
    double epsilon = 0.1;  // exploration rate, [0, 1]
    double v_min = 0.0;
    double v_max = 10.0;

    void validate() const;

    friend bool operator==(const LearningConfig&, const LearningConfig&) = default;
};

/// One externally observed reward for running `class_tag` in `context`.
struct RewardEvent {
    std::string context = "default";
    std::string class_tag;
    double reward = 0.0;
    std::string next_context = "default";
};

/// Tabular action values keyed by (context, class). Unseen entries read as 0.
class RewardTable {
public:
    using Key = std::pair<std::string, std::string>;  // (context, class_tag)

    RewardTable() = default;
    explicit RewardTable(LearningConfig config);

    [[nodiscard]] const LearningConfig& config() const noexcept { return config_; }
    [[nodiscard]] const std::map<Key, double>& values() const noexcept { return values_; }
    /// Every class tag ever written, in any context.
    [[nodiscard]] const std::set<std::string>& actions() const noexcept { return actions_; }

    [[nodiscard]] double value(const std::string& context, const std::string& class_tag) const;
    void set(const std::string& context, const std::string& class_tag, double value);

    /// max over known classes of Q(context, class); 0 when nothing is known.
    [[nodiscard]] double max_value(const std::string& context) const;

    /// One-step Q-learning:
    ///   Q(s,a) += alpha * (r + gamma_d * max_a' Q(s',a') - Q(s,a))
    /// Returns the updated Q(s,a). Throws NonFiniteReward for NaN/inf rewards.
    double q_update(const std::string& s, const std::string& a, double r,
                    const std::string& s_next);

    /// Maps the clamped, normalised value of (context, class) onto a level in
    /// [0, levels): the highest value gets level 0.
    [[nodiscard]] int priority_for(const std::string& class_tag, const std::string& context,
                                   int levels) const;

    /// Highest-valued action among `candidates` (first wins ties).
    [[nodiscard]] const std::string& greedy(const std::string& context,
                                            std::span<const std::string> candidates) const;

    /// Greedy with probability 1 - epsilon, otherwise uniform over
    /// `candidates`. Consumes exactly one draw, plus one more when exploring.
    [[nodiscard]] const std::string& epsilon_greedy(const std::string& context,
                                                    std::span<const std::string> candidates,
                                                    Rng& rng) const;

    friend bool operator==(const RewardTable&, const RewardTable&) = default;

private:
    LearningConfig config_;
    std::map<Key, double> values_;
    std::set<std::string> actions_;
};

/// Folds one reward event into the table and returns the Reward record
/// describing it.
TraceRecord observe(RewardTable& table, const RewardEvent& event, Tick t,
                    std::optional<TaskId> task = std::nullopt);

}  // namespace cocomo
