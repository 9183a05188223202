#pragma once

#include "cocomo/common.hpp"

namespace cocomo {

/// Leaky-integrator accumulator. `value` is only meaningful together with
/// the tick it was last brought up to date.
struct Energy {
    double value = 0.0;
    Tick last_update = 0;

    friend bool operator==(const Energy&, const Energy&) = default;
};

struct AttentionConfig {
    double tau = 16.0;            // decay time constant, ticks
    double wake_threshold = 10.0;
    double fade_threshold = 2.0;
    double beta = 0.25;           // boredom penalty per consecutive quantum

    /// Throws InvalidConfig unless tau > 0, beta >= 0 and 0 < fade < wake.
    void validate() const;
};

struct Accumulation {
    Energy energy;
    bool crossed_up = false;
};

/// Exponential decay of `e` up to `now`. Throws TimeReversal if `now` lies
/// before the last update.
[[nodiscard]] Energy decay(const Energy& e, Tick now, double tau);

/// Decays to `time` and adds `intensity`. `crossed_up` reports an upward
/// crossing of `wake_threshold`; a value already at or above the threshold
/// never re-triggers.
[[nodiscard]] Accumulation accumulate(const Energy& e, Tick time, double intensity,
                                      const AttentionConfig& cfg);
[[nodiscard]] Accumulation accumulate(const Energy& e, const StimulusEvent& s,
                                      const AttentionConfig& cfg);

/// True iff the energy decayed to `now` is strictly below the fade threshold.
[[nodiscard]] bool should_fade(const Energy& e, const AttentionConfig& cfg, Tick now);

/// Negative reward for staying on the same task: -beta * consecutive_quanta.
[[nodiscard]] double boredom_penalty(long long consecutive_quanta, double beta);

}  // namespace cocomo
