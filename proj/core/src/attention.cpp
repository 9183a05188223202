#include "cocomo/attention.hpp"

#include <cmath>
#include <string>

#include "cocomo/error.hpp"

namespace cocomo {

void AttentionConfig::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw Error(Errc::InvalidConfig, "attention.tau must be positive");
    }
    if (!(fade_threshold > 0.0) || !(fade_threshold < wake_threshold) ||
        !std::isfinite(wake_threshold)) {
        throw Error(Errc::InvalidConfig,
                    "attention thresholds must satisfy 0 < fade_threshold < wake_threshold");
    }
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw Error(Errc::InvalidConfig, "attention.beta must be non-negative");
    }
}

Energy decay(const Energy& e, Tick now, double tau) {
    if (now < e.last_update) {
        throw Error(Errc::TimeReversal, "decay to tick " + std::to_string(now) +
                                            " before last update " +
                                            std::to_string(e.last_update));
    }
    if (now == e.last_update) {
        return e;
    }
    const double elapsed = static_cast<double>(now - e.last_update);
    return Energy{e.value * std::exp(-elapsed / tau), now};
}

Accumulation accumulate(const Energy& e, Tick time, double intensity,
                        const AttentionConfig& cfg) {
    if (!(intensity >= 0.0)) {
        throw Error(Errc::ValidationError, "stimulus intensity must be non-negative");
    }
    Energy out = decay(e, time, cfg.tau);
    const bool below = out.value < cfg.wake_threshold;
    out.value += intensity;
    return {out, below && out.value >= cfg.wake_threshold};
}

Accumulation accumulate(const Energy& e, const StimulusEvent& s, const AttentionConfig& cfg) {
    return accumulate(e, s.time, s.intensity, cfg);
}

bool should_fade(const Energy& e, const AttentionConfig& cfg, Tick now) {
    const double value = now < e.last_update ? e.value : decay(e, now, cfg.tau).value;
    return value < cfg.fade_threshold;
}

double boredom_penalty(long long consecutive_quanta, double beta) {
    return 0.0 - beta * static_cast<double>(consecutive_quanta);
}

}  // namespace cocomo
