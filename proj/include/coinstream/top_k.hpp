#pragma once

// Top-k selection with O(k) stored coins.
//
// k kings carry budgets; a buffer of K = 10k coins is pruned by trials. In a
// trial a random buffer pivot duels every buffer coin (s_1 tosses) and
// challenges every king. If the pivot lost at least k times it is discarded
// together with everything it beat; otherwise it replaces one of the kings it
// defeated and the trial repeats.

#include <cstddef>
#include <optional>
#include <vector>

#include "coinstream/game_of_coins.hpp"
#include "coinstream/result.hpp"
#include "coinstream/schedules.hpp"

namespace coinstream {

inline constexpr std::size_t kBufferFactor = 10;

struct Court {
  std::vector<KingState> kings;
  std::vector<CoinHandle> buffer;
  std::size_t trial_count = 0;
  std::optional<std::size_t> trial_cap;
};

struct FederatedOptions {
  std::optional<std::size_t> trial_cap;
};

// 2 * ceil(200 n / k): twice the expected-trial bound.
std::size_t default_trial_cap(std::size_t n, std::size_t k);

TrialRecord run_trial(StreamSession& session, Court& court,
                      const ChallengeSchedule& schedule, const DuelFn& duel_fn = duel);

RunResult run_federated(StreamSession& session, const ChallengeSchedule& schedule,
                        std::size_t k, const FederatedOptions& options = {},
                        const DuelFn& duel_fn = duel);

}  // namespace coinstream
