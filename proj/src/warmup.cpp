#include "coinstream/warmup.hpp"

#include <algorithm>
#include <optional>
#include <vector>

#include "coinstream/errors.hpp"

namespace coinstream {

namespace {

constexpr std::size_t kBucketSize = 4;

void require_family(const ChallengeSchedule& s, Family a, Family b) {
  if (s.family != a && s.family != b) {
    throw InvalidSchedule("schedule family " + to_string(s.family) +
                          " does not fit this algorithm");
  }
  s.validate();
}

void require_length(const StreamSession& session, std::size_t n) {
  if (n == 0 || session.instance().size() == 0) throw EmptyStream();
  if (n != session.instance().size()) {
    throw InvalidConfig("declared n differs from the stream length");
  }
}

std::size_t pow4(unsigned t) {
  std::size_t p = 1;
  for (unsigned i = 0; i < t; ++i) p *= 4;
  return p;
}

// Samples every coin m times, keeps the argmax (ties to the earlier arrival)
// and releases the rest.
CoinHandle select_best(StreamSession& session, std::vector<CoinHandle>& bucket,
                       std::uint64_t m) {
  std::size_t best = 0;
  double best_mean = -1.0;
  for (std::size_t i = 0; i < bucket.size(); ++i) {
    const double mean = sample_mean(session, bucket[i], m);
    if (mean > best_mean ||
        (mean == best_mean &&
         session.position_of(bucket[i]) < session.position_of(bucket[best]))) {
      best = i;
      best_mean = mean;
    }
  }
  const CoinHandle winner = bucket[best];
  for (std::size_t i = 0; i < bucket.size(); ++i) {
    if (i != best) session.release(bucket[i]);
  }
  bucket.clear();
  return winner;
}

// Symmetric duel: higher empirical mean wins, ties to the earlier arrival.
// The loser is released.
CoinHandle keep_better(StreamSession& session, CoinHandle a, CoinHandle b,
                       std::uint64_t m) {
  const DuelOutcome out = duel(session, a, b, m);
  bool a_wins = out.winner == DuelOutcome::Side::first;
  if (out.tie) a_wins = session.position_of(a) < session.position_of(b);
  session.release(a_wins ? b : a);
  return a_wins ? a : b;
}

// Adds an arrival to B_1 and cascades full buckets upward. Champions that
// leave level t are returned.
std::optional<CoinHandle> push_bucketed(StreamSession& session,
                                        const ChallengeSchedule& schedule,
                                        std::vector<std::vector<CoinHandle>>& buckets,
                                        CoinHandle arrival) {
  const unsigned t = static_cast<unsigned>(buckets.size());
  if (t == 0) return arrival;
  buckets[0].push_back(arrival);
  for (unsigned l = 1; l <= t; ++l) {
    auto& bucket = buckets[l - 1];
    if (bucket.size() < kBucketSize) return std::nullopt;
    const CoinHandle champ = select_best(session, bucket, s_level(schedule, l));
    if (l == t) return champ;
    buckets[l].push_back(champ);
  }
  return std::nullopt;
}

RunResult finish(const StreamSession& session, CoinHandle chosen) {
  RunResult r;
  r.chosen = {chosen.index};
  r.total_tosses = session.tally().total_tosses;
  r.peak_held = session.tally().peak_held;
  return r;
}

}  // namespace

RunResult run_log_n(StreamSession& session, const ChallengeSchedule& schedule,
                    std::size_t n) {
  require_family(schedule, Family::logn, Family::logn);
  require_length(session, n);
  const unsigned t = level_count(schedule, n);
  session.pad_to(pow4(t));

  std::vector<std::vector<CoinHandle>> buckets(t);
  std::optional<CoinHandle> top;
  while (const auto arrival = session.advance()) {
    session.hold(*arrival);
    if (auto champ = push_bucketed(session, schedule, buckets, *arrival)) top = champ;
  }
  if (!top) throw Error("padding did not fill the top bucket");
  return finish(session, *top);
}

RunResult run_log_log_n(StreamSession& session, const ChallengeSchedule& schedule,
                        std::size_t n) {
  require_family(schedule, Family::loglogn, Family::loglogn);
  require_length(session, n);
  const unsigned t = level_count(schedule, n);
  const std::size_t block = pow4(t);
  session.pad_to((n + block - 1) / block * block);
  const std::uint64_t m_top = s_top(schedule, n);

  std::vector<std::vector<CoinHandle>> buckets(t);
  std::optional<CoinHandle> candidate;
  while (const auto arrival = session.advance()) {
    session.hold(*arrival);
    const auto champ = push_bucketed(session, schedule, buckets, *arrival);
    if (!champ) continue;
    candidate = candidate ? keep_better(session, *candidate, *champ, m_top) : *champ;
  }
  if (!candidate) throw Error("padding did not fill the top bucket");
  return finish(session, *candidate);
}

RunResult run_champion_ladder(StreamSession& session, const ChallengeSchedule& schedule,
                              std::size_t n) {
  require_family(schedule, Family::logstar, Family::epsbest);
  require_length(session, n);
  const unsigned t = level_count(schedule, n);

  std::vector<std::optional<CoinHandle>> champion(t);
  std::vector<std::uint64_t> counter(t, 0);

  // Processes `coin` at level l (1-based) and returns the coin to promote to
  // level l+1, if any.
  const auto enter = [&](unsigned l, CoinHandle coin) -> std::optional<CoinHandle> {
    auto& champ = champion[l - 1];
    if (!champ) {
      champ = coin;
    } else {
      const DuelOutcome out = duel(session, *champ, coin, s_level(schedule, l));
      if (out.winner == DuelOutcome::Side::first) {
        session.release(coin);
      } else {
        session.release(*champ);
        champ = coin;
      }
    }
    if (++counter[l - 1] < c_level(schedule, l) || l == t) return std::nullopt;
    counter[l - 1] = 0;
    const CoinHandle up = *champ;
    champ.reset();
    return up;
  };

  while (const auto arrival = session.advance()) {
    session.hold(*arrival);
    std::optional<CoinHandle> moving = *arrival;
    for (unsigned l = 1; moving && l <= t; ++l) moving = enter(l, *moving);
  }

  // Stream end: carry each level's champion up to the last level.
  for (unsigned l = 1; l < t; ++l) {
    if (!champion[l - 1]) continue;
    const CoinHandle up = *champion[l - 1];
    champion[l - 1].reset();
    auto& next = champion[l];
    if (!next) {
      next = up;
    } else {
      const DuelOutcome out = duel(session, *next, up, s_level(schedule, l + 1));
      if (out.winner == DuelOutcome::Side::first) {
        session.release(up);
      } else {
        session.release(*next);
        next = up;
      }
    }
  }
  if (!champion[t - 1]) throw Error("ladder ended without a top champion");
  return finish(session, *champion[t - 1]);
}

RunResult run_log_star(StreamSession& session, const ChallengeSchedule& schedule,
                       std::size_t n) {
  require_family(schedule, Family::logstar, Family::logstar);
  return run_champion_ladder(session, schedule, n);
}

std::size_t stated_memory(const ChallengeSchedule& schedule, std::size_t n) {
  const std::size_t t = level_count(schedule, n);
  switch (schedule.family) {
    case Family::logn: return std::max<std::size_t>(1, 4 * t);
    case Family::loglogn: return 4 * t + 1;
    case Family::logstar:
    case Family::epsbest: return t;
    default: throw InvalidSchedule("no stated memory for family " + to_string(schedule.family));
  }
}

}  // namespace coinstream
