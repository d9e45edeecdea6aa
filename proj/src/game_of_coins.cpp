#include "coinstream/game_of_coins.hpp"

#include "coinstream/errors.hpp"

namespace coinstream {

namespace {

void require_king_family(const ChallengeSchedule& s) {
  if (s.family != Family::main && s.family != Family::topk) {
    throw InvalidSchedule("challenge needs a main or topk schedule, got " +
                          to_string(s.family));
  }
}

}  // namespace

ChallengeReport challenge(StreamSession& session, KingState& king,
                          CoinHandle challenger, const ChallengeSchedule& schedule,
                          const DuelFn& duel_fn) {
  require_king_family(schedule);
  ChallengeReport rep;
  for (unsigned level = 1;; ++level) {
    const std::uint64_t s = s_level(schedule, level);
    if (king.budget < static_cast<double>(s)) {
      rep.result = ChallengeResult::king_defeated;
      rep.unaffordable = s;
      return rep;
    }
    king.budget -= static_cast<double>(s);
    const DuelOutcome out = duel_fn(session, king.handle, challenger, s);
    rep.tosses += out.tosses_used;
    ++rep.levels;
    if (out.winner == DuelOutcome::Side::first) {
      rep.result = ChallengeResult::king_wins;
      return rep;
    }
  }
}

RunResult run_game_of_coins(StreamSession& session, const ChallengeSchedule& schedule,
                            const DuelFn& duel_fn) {
  require_king_family(schedule);
  schedule.validate();
  const double b = budget_increment(schedule);

  const auto first = session.advance();
  if (!first) throw EmptyStream();
  session.hold(*first);
  KingState king{*first, 0.0, session.position_of(*first)};

  RunResult result;
  while (const auto arrival = session.advance()) {
    king.budget += b;
    ChallengeEvent ev;
    ev.position = session.position_of(*arrival);
    ev.challenger = arrival->index;
    ev.king = king.handle.index;
    ev.budget_before = king.budget;

    const ChallengeReport rep = challenge(session, king, *arrival, schedule, duel_fn);
    ev.budget_after = king.budget;
    ev.tosses = rep.tosses;
    ev.levels = rep.levels;
    ev.king_won = rep.result == ChallengeResult::king_wins;
    ev.unaffordable = static_cast<double>(rep.unaffordable);
    result.budget_trace.push_back(ev);

    if (!ev.king_won) {
      session.release(king.handle);
      session.hold(*arrival);
      king = KingState{*arrival, 0.0, ev.position};
      ++result.king_changes;
    }
  }

  result.chosen = {king.handle.index};
  result.total_tosses = session.tally().total_tosses;
  result.peak_held = session.tally().peak_held;
  return result;
}

}  // namespace coinstream
