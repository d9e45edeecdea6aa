#pragma once

// Single-coin-memory most-biased-coin selection.
//
// One king is stored. Each arriving coin adds b to the king's budget and then
// challenges it through escalating levels; the king pays s_l per level and
// must win a level strictly to stay. A king that cannot pay is defeated and
// the challenger takes over with an empty budget.

#include <cstddef>
#include <cstdint>

#include "coinstream/result.hpp"
#include "coinstream/schedules.hpp"

namespace coinstream {

struct KingState {
  CoinHandle handle;
  double budget = 0.0;
  std::size_t reign_start = 0;
};

enum class ChallengeResult { king_wins, king_defeated };

struct ChallengeReport {
  ChallengeResult result = ChallengeResult::king_defeated;
  std::uint64_t tosses = 0;
  unsigned levels = 0;
  // s_l of the level that ended the challenge by exhausting the budget.
  std::uint64_t unaffordable = 0;
};

ChallengeReport challenge(StreamSession& session, KingState& king,
                          CoinHandle challenger, const ChallengeSchedule& schedule,
                          const DuelFn& duel_fn = duel);

// Takes no stream length: the algorithm never learns n.
RunResult run_game_of_coins(StreamSession& session, const ChallengeSchedule& schedule,
                            const DuelFn& duel_fn = duel);

}  // namespace coinstream
