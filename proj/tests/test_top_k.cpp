#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "coinstream/errors.hpp"
#include "coinstream/game_of_coins.hpp"
#include "coinstream/top_k.hpp"

using namespace coinstream;

namespace {

DuelOutcome by_value(StreamSession& s, CoinHandle a, CoinHandle b, std::uint64_t) {
  DuelOutcome out;
  const double va = s.instance().values[a.index];
  const double vb = s.instance().values[b.index];
  out.tie = va == vb;
  out.winner = va > vb ? DuelOutcome::Side::first : DuelOutcome::Side::second;
  out.empirical_first = va;
  out.empirical_second = vb;
  return out;
}

std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Holds every coin of the instance and returns the handles.
std::vector<CoinHandle> hold_all(StreamSession& s) {
  std::vector<CoinHandle> out;
  while (auto h = s.advance()) {
    s.hold(*h);
    out.push_back(*h);
  }
  return out;
}

}  // namespace

TEST_SUITE("top_k") {

TEST_CASE("default trial cap") {
  CHECK(default_trial_cap(500, 5) == 40000);
  CHECK(default_trial_cap(7, 3) == 2 * 467);
  CHECK_THROWS_AS(default_trial_cap(10, 0), InvalidConfig);
}

TEST_CASE("too few coins and mismatched schedules are rejected") {
  const auto inst = CoinInstance::coins({0.5, 0.5});
  StreamSession s(inst, 1);
  CHECK_THROWS_AS(run_federated(s, ChallengeSchedule::make(Family::topk, 0.5, 0.1, 32, 3), 3),
                  InstanceTooSmall);
  const auto big = CoinInstance::coins(std::vector<double>(50, 0.5));
  StreamSession s2(big, 1);
  CHECK_THROWS_AS(run_federated(s2, ChallengeSchedule::make(Family::topk, 0.5, 0.1, 32, 2), 3),
                  InvalidSchedule);
}

TEST_CASE("k = 1 is the single-king game") {
  std::vector<double> v(80, 0.4);
  v[33] = 0.8;
  const auto inst = CoinInstance::coins(v);
  StreamSession s1(inst, 5), s2(inst, 5);
  const RunResult a = run_federated(s1, ChallengeSchedule::make(Family::topk, 0.4, 0.1, 32, 1), 1);
  const RunResult b = run_game_of_coins(s2, ChallengeSchedule::make(Family::main, 0.4, 0.1));
  CHECK(a.chosen == b.chosen);
  CHECK(a.total_tosses == b.total_tosses);
}

TEST_CASE("swap trial: a pivot that beats the king takes its seat") {
  // kings = {0.2}, buffer = {0.9, 0.1}, k = 2.
  const auto inst = CoinInstance::coins({0.2, 0.9, 0.1});
  const auto sch = ChallengeSchedule::make(Family::topk, 0.5, 0.1, 32, 2);
  bool saw_swap = false, saw_discard = false;
  for (std::uint64_t seed = 1; seed <= 40 && !(saw_swap && saw_discard); ++seed) {
    StreamSession s(inst, seed);
    const auto h = hold_all(s);
    Court court;
    court.kings = {KingState{h[0], 0.0, 0}};
    court.buffer = {h[1], h[2]};
    const TrialRecord rec = run_trial(s, court, sch, by_value);
    CHECK(court.trial_count == 1);
    if (rec.pivot == 1) {
      saw_swap = true;
      CHECK(rec.outcome == TrialRecord::Outcome::swap);
      CHECK(rec.defeats == 0);
      CHECK(rec.swapped_king == std::optional<std::size_t>{0});
      REQUIRE(court.kings.size() == 1);
      CHECK(court.kings[0].handle.index == 1);
      CHECK(court.kings[0].budget == 0.0);
      CHECK(court.buffer[0].index == 0);
      CHECK(court.buffer[1].index == 2);
    } else {
      saw_discard = true;
      CHECK(rec.outcome == TrialRecord::Outcome::discard);
      CHECK(rec.defeats == 2);
      CHECK(rec.discarded == std::vector<std::size_t>{2});
      CHECK(court.buffer.size() == 1);
      CHECK(court.kings.size() == 1);
      CHECK(court.kings[0].budget == doctest::Approx(budget_increment(sch) - s_level(sch, 1)));
    }
  }
  CHECK(saw_swap);
  CHECK(saw_discard);
}

TEST_CASE("swap with no defeated king throws") {
  const auto inst = CoinInstance::coins({1.0, 0.5});
  const auto sch = ChallengeSchedule::make(Family::topk, 0.5, 0.1, 32, 2);
  StreamSession s(inst, 1);
  const auto h = hold_all(s);
  Court court;
  court.kings = {KingState{h[0], 0.0, 0}};
  court.buffer = {h[1]};
  CHECK_THROWS_AS(run_trial(s, court, sch, by_value), NoDefeatedKing);
}

TEST_CASE("discard removes pivot, beaten buffer coins and defeated kings") {
  // kings = {0.1, 0.95}, buffer = {0.5 x 20}; a 0.5 pivot loses to the
  // strong king and to earlier tied arrivals.
  std::vector<double> v = {0.1, 0.95};
  for (int i = 0; i < 20; ++i) v.push_back(0.5);
  const auto inst = CoinInstance::coins(v);
  const auto sch = ChallengeSchedule::make(Family::topk, 0.5, 0.1, 32, 2);
  StreamSession s(inst, 3);
  const auto h = hold_all(s);
  Court court;
  court.kings = {KingState{h[0], 0.0, 0}, KingState{h[1], 0.0, 1}};
  court.buffer.assign(h.begin() + 2, h.end());
  const TrialRecord rec = run_trial(s, court, sch, by_value);
  const std::size_t pivot_slot = rec.pivot - 2;
  // earlier buffer coins beat the pivot on ties; king 1 beats it; king 0 loses.
  CHECK(rec.defeats == pivot_slot + 1);
  if (rec.defeats >= 2) {
    CHECK(rec.outcome == TrialRecord::Outcome::discard);
    CHECK(court.kings.size() == 1);
    CHECK(court.kings[0].handle.index == 1);
    CHECK(court.buffer.size() == pivot_slot);
    CHECK(std::find(rec.discarded.begin(), rec.discarded.end(), 0) != rec.discarded.end());
  } else {
    CHECK(rec.outcome == TrialRecord::Outcome::swap);
    CHECK(rec.swapped_king == std::optional<std::size_t>{0});
  }
}

TEST_CASE("comparator runs recover the exact top k") {
  for (std::size_t k : {2u, 3u, 5u}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const std::size_t n = 120;
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = (i * 37) % n >= n - k ? 1.0 : 0.0;
      const auto inst = CoinInstance::coins(v);
      StreamSession s(inst, seed, 11 * k);
      const auto sch = ChallengeSchedule::make(Family::topk, 0.5, 0.1, 32, k);
      const RunResult r = run_federated(s, sch, k, {}, by_value);
      CAPTURE(k);
      CAPTURE(seed);
      CHECK(sorted(r.chosen) == sorted(top_indices(v, k)));
      CHECK(r.peak_held <= 11 * k);
      CHECK_FALSE(r.capped);
      for (const auto& rec : r.trial_log) {
        if (rec.outcome == TrialRecord::Outcome::discard) CHECK(rec.defeats >= k);
        else CHECK(rec.swapped_king.has_value());
      }
    }
  }
}

TEST_CASE("a trial cap ends the run early and is reported") {
  const std::size_t n = 200, k = 3;
  std::vector<double> v(n, 0.5);
  const auto inst = CoinInstance::coins(v);
  StreamSession s(inst, 2);
  const auto sch = ChallengeSchedule::make(Family::topk, 0.5, 0.1, 32, k);
  FederatedOptions opt;
  opt.trial_cap = 3;
  const RunResult r = run_federated(s, sch, k, opt);
  CHECK(r.capped);
  CHECK(r.trials <= 3);
  CHECK(r.trial_log.size() <= 3);
  CHECK(r.chosen.size() == k);
}

TEST_CASE("noisy comparisons with gamma 1/2 find the top ranks") {
  const std::size_t n = 60, k = 3;
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n; ++i) ranks[i] = static_cast<double>((i * 23) % n);
  const auto inst = CoinInstance::noisy(ranks, 0.5);
  StreamSession s(inst, 4);
  const RunResult r =
      run_federated(s, ChallengeSchedule::make(Family::topk, 0.5, 0.1, 32, k), k);
  CHECK(sorted(r.chosen) == sorted(top_indices(ranks, k)));
}

}
