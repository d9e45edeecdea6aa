#include "coinstream/top_k.hpp"

#include <algorithm>

#include "coinstream/errors.hpp"

namespace coinstream {

std::size_t default_trial_cap(std::size_t n, std::size_t k) {
  if (k == 0) throw InvalidConfig("k must be positive");
  return 2 * ((200 * n + k - 1) / k);
}

TrialRecord run_trial(StreamSession& session, Court& court,
                      const ChallengeSchedule& schedule, const DuelFn& duel_fn) {
  if (court.buffer.empty()) throw Error("trial on an empty buffer");
  const std::uint64_t before = session.tally().total_tosses;
  const std::size_t k = schedule.k;

  const std::size_t pivot_slot = session.uniform_index(court.buffer.size());
  const CoinHandle pivot = court.buffer[pivot_slot];
  const double b = budget_increment(schedule);
  for (KingState& king : court.kings) king.budget += b;

  TrialRecord rec;
  rec.pivot = pivot.index;
  ++court.trial_count;

  // Buffer-challenge: symmetric duels, ties to the earlier arrival.
  const std::uint64_t s1 = s_level(schedule, 1);
  const std::size_t pivot_pos = session.position_of(pivot);
  std::vector<bool> buffer_lost(court.buffer.size(), false);
  for (std::size_t i = 0; i < court.buffer.size(); ++i) {
    if (i == pivot_slot) continue;
    const CoinHandle other = court.buffer[i];
    const DuelOutcome out = duel_fn(session, pivot, other, s1);
    bool pivot_wins = out.winner == DuelOutcome::Side::first;
    if (out.tie) pivot_wins = pivot_pos < session.position_of(other);
    if (pivot_wins) {
      buffer_lost[i] = true;
    } else {
      ++rec.defeats;
    }
  }

  // King-challenge: the pivot challenges each king with that king's budget.
  std::vector<bool> king_lost(court.kings.size(), false);
  for (std::size_t i = 0; i < court.kings.size(); ++i) {
    const ChallengeReport rep =
        challenge(session, court.kings[i], pivot, schedule, duel_fn);
    if (rep.result == ChallengeResult::king_wins) {
      ++rec.defeats;
    } else {
      king_lost[i] = true;
    }
  }

  if (rec.defeats >= k) {
    rec.outcome = TrialRecord::Outcome::discard;
    std::vector<CoinHandle> buffer;
    for (std::size_t i = 0; i < court.buffer.size(); ++i) {
      if (i == pivot_slot || buffer_lost[i]) {
        rec.discarded.push_back(court.buffer[i].index);
        session.release(court.buffer[i]);
      } else {
        buffer.push_back(court.buffer[i]);
      }
    }
    std::vector<KingState> kings;
    for (std::size_t i = 0; i < court.kings.size(); ++i) {
      if (king_lost[i]) {
        rec.discarded.push_back(court.kings[i].handle.index);
        session.release(court.kings[i].handle);
      } else {
        kings.push_back(court.kings[i]);
      }
    }
    court.buffer = std::move(buffer);
    court.kings = std::move(kings);
  } else {
    rec.outcome = TrialRecord::Outcome::swap;
    std::vector<std::size_t> beaten;
    for (std::size_t i = 0; i < king_lost.size(); ++i) {
      if (king_lost[i]) beaten.push_back(i);
    }
    if (beaten.empty()) {
      throw NoDefeatedKing("pivot lost fewer than k times but beat no king");
    }
    const std::size_t slot = beaten[session.uniform_index(beaten.size())];
    KingState& king = court.kings[slot];
    rec.swapped_king = king.handle.index;
    court.buffer[pivot_slot] = king.handle;
    king = KingState{pivot, 0.0, pivot_pos};
  }
  rec.tosses = session.tally().total_tosses - before;
  return rec;
}

namespace {

struct Ranked {
  CoinHandle handle;
  double mean;
  std::size_t position;
};

}  // namespace

RunResult run_federated(StreamSession& session, const ChallengeSchedule& schedule,
                        std::size_t k, const FederatedOptions& options,
                        const DuelFn& duel_fn) {
  if (k == 0) throw InvalidConfig("k must be positive");
  if (session.instance().size() == 0) throw EmptyStream();
  if (session.instance().size() < k) {
    throw InstanceTooSmall("stream has fewer than k coins");
  }
  if (k == 1) {
    const ChallengeSchedule main =
        ChallengeSchedule::make(Family::main, schedule.gap, schedule.delta, schedule.C);
    return run_game_of_coins(session, main, duel_fn);
  }
  if (schedule.family != Family::topk || schedule.k != k) {
    throw InvalidSchedule("run_federated needs a topk schedule with matching k");
  }
  schedule.validate();

  const std::size_t capacity = kBufferFactor * k;
  Court court;
  court.trial_cap = options.trial_cap;
  RunResult result;
  bool exhausted = false;

  const auto next_coin = [&]() -> std::optional<CoinHandle> {
    if (exhausted) return std::nullopt;
    auto h = session.advance();
    if (!h) {
      exhausted = true;
      return std::nullopt;
    }
    session.hold(*h);
    return h;
  };

  const auto fill_kings = [&] {
    while (court.kings.size() < k) {
      const auto h = next_coin();
      if (!h) return;
      court.kings.push_back(KingState{*h, 0.0, session.position_of(*h)});
    }
  };

  fill_kings();
  for (;;) {
    while (court.buffer.size() < capacity) {
      const auto h = next_coin();
      if (!h) break;
      court.buffer.push_back(*h);
    }
    if (court.buffer.size() < capacity) break;

    bool discarded = false;
    while (!discarded) {
      if (court.trial_cap && court.trial_count >= *court.trial_cap) {
        result.capped = true;
        break;
      }
      TrialRecord rec = run_trial(session, court, schedule, duel_fn);
      discarded = rec.outcome == TrialRecord::Outcome::discard;
      if (!discarded) ++result.king_changes;
      result.trial_log.push_back(std::move(rec));
    }
    if (result.capped) break;
    fill_kings();
  }

  // Final selection over KINGS and B.
  const std::uint64_t s1 = s_level(schedule, 1);
  std::vector<Ranked> pool;
  for (const KingState& king : court.kings) pool.push_back({king.handle, 0.0, 0});
  for (const CoinHandle& h : court.buffer) pool.push_back({h, 0.0, 0});
  for (Ranked& r : pool) {
    r.position = session.position_of(r.handle);
    result.final_pool.push_back(r.handle.index);
  }
  if (session.instance().kind == InstanceKind::noisy_order) {
    // Elements have no bias to estimate; score each by its share of wins in
    // s_1 comparisons against every other pool member.
    for (std::size_t i = 0; i < pool.size(); ++i) {
      for (std::size_t j = i + 1; j < pool.size(); ++j) {
        const DuelOutcome out = duel_fn(session, pool[i].handle, pool[j].handle, s1);
        pool[i].mean += out.empirical_first;
        pool[j].mean += out.empirical_second;
      }
    }
  } else {
    for (Ranked& r : pool) r.mean = sample_mean(session, r.handle, s1);
  }
  std::sort(pool.begin(), pool.end(), [](const Ranked& a, const Ranked& b) {
    if (a.mean != b.mean) return a.mean > b.mean;
    return a.position < b.position;
  });
  for (std::size_t i = 0; i < pool.size() && i < k; ++i) {
    result.chosen.push_back(pool[i].handle.index);
  }

  result.trials = court.trial_count;
  result.total_tosses = session.tally().total_tosses;
  result.peak_held = session.tally().peak_held;
  return result;
}

}  // namespace coinstream
