#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "cocomo/attention.hpp"
#include "cocomo/error.hpp"
#include "cocomo/random.hpp"
#include "support/oracles.hpp"

namespace cocomo {
namespace {

using testing::Pulse;

TEST(Decay, ZeroElapsedIsIdentity) {
    const Energy e{8.0, 5};
    EXPECT_EQ(decay(e, 5, 16.0).value, 8.0);
}

TEST(Decay, LongHorizonVanishes) {
    EXPECT_LT(decay(Energy{8.0, 0}, 100000, 16.0).value, 1e-300);
}

TEST(Decay, RejectsTimeReversal) {
    try {
        (void)decay(Energy{1.0, 10}, 9, 16.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::TimeReversal);
    }
}

TEST(Decay, TwoPulseSuperposition) {
    AttentionConfig cfg;
    cfg.tau = 4.0;
    Energy e;
    e = accumulate(e, 0, 5.0, cfg).energy;
    e = accumulate(e, 2, 4.0, cfg).energy;
    // 5 e^(-3/4) + 4 e^(-1/4)
    EXPECT_NEAR(decay(e, 3, cfg.tau).value, 5.477035895990693, 1e-12);
}

TEST(Accumulate, ExactThresholdCrosses) {
    AttentionConfig cfg;
    const auto acc = accumulate(Energy{}, 0, cfg.wake_threshold, cfg);
    EXPECT_TRUE(acc.crossed_up);
}

TEST(Accumulate, NoRetriggerAboveThreshold) {
    AttentionConfig cfg;
    for (double intensity : {0.0, 0.5, 3.0, 50.0}) {
        EXPECT_FALSE(accumulate(Energy{12.0, 0}, 0, intensity, cfg).crossed_up);
    }
}

TEST(Accumulate, StaircaseCrossesOnce) {
    // Equal sub-threshold steps up to the first step that meets the threshold.
    AttentionConfig cfg;  // tau 16, wake 10
    std::vector<Pulse> pulses;
    Energy e;
    std::vector<std::size_t> crossings;
    for (std::size_t i = 0; i < 4; ++i) {
        const Tick t = static_cast<Tick>(2 * i);
        pulses.push_back({t, 3.0});
        if (accumulate(e, t, 3.0, cfg).crossed_up) crossings.push_back(i);
        e = accumulate(e, t, 3.0, cfg).energy;
    }
    std::vector<std::size_t> replay;
    EXPECT_EQ(testing::tick_replay_crossings(pulses, cfg.tau, cfg.wake_threshold, &replay), 1);
    // 3, 5.647, 7.984, 10.046: the fourth pulse (t=6) crosses.
    EXPECT_EQ(replay, std::vector<std::size_t>{3});
    EXPECT_EQ(crossings, replay);
}

TEST(Accumulate, RejectsTimeReversal) {
    AttentionConfig cfg;
    EXPECT_THROW((void)accumulate(Energy{0.0, 4}, 3, 1.0, cfg), Error);
}

TEST(ShouldFade, StrictAtThreshold) {
    AttentionConfig cfg;
    EXPECT_FALSE(should_fade(Energy{cfg.fade_threshold, 0}, cfg, 0));
    EXPECT_TRUE(should_fade(Energy{0.0, 0}, cfg, 0));
}

TEST(ShouldFade, AnalyticFadeTime) {
    AttentionConfig cfg;
    // tau ln(wake/fade) = 25.751...
    const double cross = 25.751006598945605;
    EXPECT_FALSE(should_fade(Energy{cfg.wake_threshold, 0}, cfg, 25));
    EXPECT_TRUE(should_fade(Energy{cfg.wake_threshold, 0}, cfg, static_cast<Tick>(std::ceil(cross))));
}

TEST(Boredom, Linear) {
    EXPECT_EQ(boredom_penalty(0, 0.7), 0.0);
    EXPECT_EQ(boredom_penalty(3, 0.5), -1.5);
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        const auto k = static_cast<long long>(uniform_below(rng, 1000));
        const double beta = uniform01(rng) * 3.0;
        EXPECT_DOUBLE_EQ(boredom_penalty(k, beta), -beta * static_cast<double>(k));
    }
}

TEST(AttentionConfig, Validation) {
    AttentionConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.fade_threshold = cfg.wake_threshold;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.tau = 0.0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.beta = -1.0;
    EXPECT_THROW(cfg.validate(), Error);
}

TEST(AttentionProperty, DecayComposes) {
    Rng rng(99);
    for (int i = 0; i < 2000; ++i) {
        const Energy e{uniform01(rng) * 20.0, static_cast<Tick>(uniform_below(rng, 50))};
        const double tau = 1.0 + uniform01(rng) * 40.0;
        const Tick t1 = e.last_update + static_cast<Tick>(uniform_below(rng, 100));
        const Tick t2 = t1 + static_cast<Tick>(uniform_below(rng, 100));
        EXPECT_NEAR(decay(decay(e, t1, tau), t2, tau).value, decay(e, t2, tau).value, 1e-9);
    }
}

TEST(AttentionProperty, CrossingsMatchTickReplay) {
    Rng rng(2024);
    for (int script = 0; script < 500; ++script) {
        AttentionConfig cfg;
        cfg.tau = 2.0 + uniform01(rng) * 30.0;
        std::vector<Pulse> pulses;
        Tick t = 0;
        const auto n = 1 + uniform_below(rng, 40);
        for (std::uint64_t k = 0; k < n; ++k) {
            t += static_cast<Tick>(uniform_below(rng, 6));
            pulses.push_back({t, uniform01(rng) * 6.0});
        }
        Energy e;
        int crossings = 0;
        for (const auto& p : pulses) {
            const auto acc = accumulate(e, p.time, p.intensity, cfg);
            crossings += acc.crossed_up;
            e = acc.energy;
        }
        EXPECT_EQ(crossings, testing::tick_replay_crossings(pulses, cfg.tau, cfg.wake_threshold));
    }
}

// Pulses that keep the value strictly inside (fade, wake) neither wake nor
// fade the task.
TEST(AttentionProperty, Hysteresis) {
    AttentionConfig cfg;
    Rng rng(5);
    for (int run = 0; run < 200; ++run) {
        Energy e{5.0, 0};
        for (Tick t = 1; t < 200; ++t) {
            const double decayed = decay(e, t, cfg.tau).value;
            const double room = cfg.wake_threshold - decayed;
            double intensity = uniform01(rng) * room * 0.99;
            if (decayed + intensity <= cfg.fade_threshold) {
                intensity = cfg.fade_threshold - decayed + 0.1;
            }
            const auto acc = accumulate(e, t, intensity, cfg);
            ASSERT_FALSE(acc.crossed_up);
            e = acc.energy;
            ASSERT_GT(e.value, cfg.fade_threshold);
            ASSERT_LT(e.value, cfg.wake_threshold);
            ASSERT_FALSE(should_fade(e, cfg, t));
        }
    }
}

}  // namespace
}  // namespace cocomo
