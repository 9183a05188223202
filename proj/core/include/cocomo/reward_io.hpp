#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cocomo/reward.hpp"

namespace cocomo {

/// {"alpha", "gamma_d", "epsilon", "v_min", "v_max",
///  "values": [{"context", "class_tag", "value"}]} sorted by key.
std::string to_json(const RewardTable& table);

/// Newline-delimited reward records, one JSON object per line:
///   {"context": "...", "class_tag": "...", "reward": 1.5, "next_context": "..."}
/// context defaults to "default", next_context to context. Blank lines are
/// skipped. Throws ParseError naming the 1-based line.
std::vector<RewardEvent> parse_reward_stream(std::string_view text);

/// Sequential q_update fold of `events` over `table`.
RewardTable learn(RewardTable table, const std::vector<RewardEvent>& events);

}  // namespace cocomo
