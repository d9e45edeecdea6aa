#include <doctest.h>

#include <cmath>

#include "coinstream/errors.hpp"
#include "coinstream/game_of_coins.hpp"
#include "oracles.hpp"

using namespace coinstream;

namespace {

const double kInvE = std::exp(-1.0);

// Comparator duel: decides by the underlying values, never tosses.
DuelOutcome by_value(StreamSession& s, CoinHandle a, CoinHandle b, std::uint64_t) {
  DuelOutcome out;
  const double va = s.instance().values[a.index];
  const double vb = s.instance().values[b.index];
  out.tie = va == vb;
  out.winner = va > vb ? DuelOutcome::Side::first : DuelOutcome::Side::second;
  return out;
}

}  // namespace

TEST_SUITE("game_of_coins") {

TEST_CASE("two deterministic coins: newcomer dethrones the king") {
  const auto inst = CoinInstance::coins({0.0, 1.0});
  StreamSession s(inst, 1);
  const auto sch = ChallengeSchedule::make(Family::main, 0.5, kInvE, 2.0);
  const RunResult r = run_game_of_coins(s, sch);
  CHECK(r.chosen == std::vector<std::size_t>{1});
  CHECK(r.total_tosses == 96);
  CHECK(r.king_changes == 1);
  CHECK(r.peak_held == 1);
  REQUIRE(r.budget_trace.size() == 1);
  const auto& ev = r.budget_trace[0];
  CHECK(ev.budget_before == doctest::Approx(80.0));
  CHECK(ev.budget_after == doctest::Approx(32.0));
  CHECK(ev.unaffordable == 144.0);
  CHECK(ev.levels == 1);
  CHECK_FALSE(ev.king_won);
}

TEST_CASE("deterministic king keeps the crown at the first level") {
  const auto inst = CoinInstance::coins({1.0, 0.0, 0.0});
  StreamSession s(inst, 1);
  const auto sch = ChallengeSchedule::make(Family::main, 0.5, kInvE, 2.0);
  const RunResult r = run_game_of_coins(s, sch);
  CHECK(r.chosen == std::vector<std::size_t>{0});
  CHECK(r.king_changes == 0);
  CHECK(r.total_tosses == 2 * 96);
  REQUIRE(r.budget_trace.size() == 2);
  CHECK(r.budget_trace[0].budget_after == doctest::Approx(32.0));
  CHECK(r.budget_trace[1].budget_before == doctest::Approx(112.0));
  CHECK(r.budget_trace[1].budget_after == doctest::Approx(64.0));
}

TEST_CASE("challenge arithmetic matches a losing-king trace") {
  const auto sch = ChallengeSchedule::make(Family::main, 0.5, kInvE, 2.0);
  std::vector<std::uint64_t> levels;
  for (unsigned l = 1; l <= 6; ++l) levels.push_back(s_level(sch, l));
  for (double budget : {0.0, 47.0, 48.0, 191.0, 192.0, 700.0, 5000.0}) {
    CAPTURE(budget);
    const auto inst = CoinInstance::coins({0.0, 1.0});
    StreamSession s(inst, 3);
    auto k = s.advance();
    s.hold(*k);
    auto c = s.advance();
    KingState king{*k, budget, 0};
    const auto rep = challenge(s, king, *c, sch);
    const auto want = oracle::losing_king(budget, levels);
    CHECK(rep.result == ChallengeResult::king_defeated);
    CHECK(rep.tosses == want.tosses);
    CHECK(rep.levels == want.levels);
    CHECK(king.budget == doctest::Approx(want.budget));
  }
}

TEST_CASE("king wins only on a strict majority") {
  const auto inst = CoinInstance::coins({0.5, 0.5});
  const auto sch = ChallengeSchedule::make(Family::main, 0.5, kInvE, 2.0);
  StreamSession s(inst, 1);
  auto k = s.advance();
  s.hold(*k);
  auto c = s.advance();
  KingState king{*k, 1e6, 0};
  const DuelFn tie = [](StreamSession&, CoinHandle, CoinHandle, std::uint64_t m) {
    DuelOutcome o;
    o.tie = true;
    o.winner = DuelOutcome::Side::second;
    o.tosses_used = 2 * m;
    return o;
  };
  const auto rep = challenge(s, king, *c, sch, tie);
  CHECK(rep.result == ChallengeResult::king_defeated);
  CHECK(rep.unaffordable > 0);
}

TEST_CASE("empty stream and wrong families are rejected") {
  const auto sch = ChallengeSchedule::make(Family::main, 0.5, 0.1);
  CoinInstance empty;
  StreamSession s(empty, 1);
  CHECK_THROWS_AS(run_game_of_coins(s, sch), EmptyStream);
  const auto inst = CoinInstance::coins({0.5});
  StreamSession s2(inst, 1);
  CHECK_THROWS_AS(run_game_of_coins(s2, ChallengeSchedule::make(Family::logn, 0.5, 0.1)),
                  InvalidSchedule);
}

TEST_CASE("single coin is returned without tossing") {
  const auto inst = CoinInstance::coins({0.3});
  StreamSession s(inst, 1);
  const RunResult r = run_game_of_coins(s, ChallengeSchedule::make(Family::main, 0.5, 0.1));
  CHECK(r.chosen == std::vector<std::size_t>{0});
  CHECK(r.total_tosses == 0);
}

TEST_CASE("property: exactly one stored coin under a held limit of one") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::vector<double> biases(200, 0.4);
    biases[seed * 7 % 200] = 0.7;
    const auto inst = CoinInstance::coins(biases, {}, 0.3);
    StreamSession s(inst, seed, 1);
    const RunResult r = run_game_of_coins(s, ChallengeSchedule::make(Family::main, 0.3, 0.1));
    CHECK(r.peak_held == 1);
    CHECK(r.budget_trace.size() == 199);
  }
}

TEST_CASE("property: budget accounting closes for every event") {
  const auto sch = ChallengeSchedule::make(Family::main, 0.3, 0.1);
  const double b = budget_increment(sch);
  std::vector<double> biases(300, 0.5);
  biases[150] = 0.8;
  const auto inst = CoinInstance::coins(biases, {}, 0.3);
  StreamSession s(inst, 4);
  const RunResult r = run_game_of_coins(s, sch);
  double phi = 0.0;
  std::size_t king = 0;
  std::uint64_t spent = 0;
  for (const auto& ev : r.budget_trace) {
    CHECK(ev.king == king);
    phi += b;
    CHECK(ev.budget_before == doctest::Approx(phi));
    double paid = 0;
    for (unsigned l = 1; l <= ev.levels; ++l) paid += static_cast<double>(s_level(sch, l));
    CHECK(ev.budget_after == doctest::Approx(phi - paid));
    CHECK(ev.budget_after >= 0.0);
    CHECK(ev.tosses == 2 * static_cast<std::uint64_t>(paid));
    spent += ev.tosses;
    phi = ev.budget_after;
    if (!ev.king_won) {
      king = ev.challenger;
      phi = 0.0;
    }
  }
  CHECK(spent == r.total_tosses);
  CHECK(r.chosen[0] == king);
}

TEST_CASE("property: the result depends only on comparisons") {
  // Two instances with the same order of values give identical runs under a
  // comparator duel.
  const std::vector<std::size_t> order = {3, 1, 4, 0, 2, 5};
  const auto a = CoinInstance::coins({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, order);
  const auto b = CoinInstance::coins({0.01, 0.02, 0.5, 0.51, 0.9, 0.99}, order);
  const auto sch = ChallengeSchedule::make(Family::main, 0.5, 0.1);
  StreamSession sa(a, 1), sb(b, 2);
  const RunResult ra = run_game_of_coins(sa, sch, by_value);
  const RunResult rb = run_game_of_coins(sb, sch, by_value);
  CHECK(ra.chosen == rb.chosen);
  CHECK(ra.king_changes == rb.king_changes);
  REQUIRE(ra.budget_trace.size() == rb.budget_trace.size());
  for (std::size_t i = 0; i < ra.budget_trace.size(); ++i) {
    CHECK(ra.budget_trace[i].king_won == rb.budget_trace[i].king_won);
    CHECK(ra.budget_trace[i].levels == rb.budget_trace[i].levels);
  }
}

TEST_CASE("property: online, decisions on a prefix ignore the suffix") {
  const auto sch = ChallengeSchedule::make(Family::main, 0.3, 0.1);
  std::vector<double> full(120, 0.5);
  full[30] = 0.8;
  for (std::size_t i = 60; i < 120; ++i) full[i] = 0.2 + 0.001 * i;
  std::vector<double> prefix(full.begin(), full.begin() + 60);
  StreamSession s1(CoinInstance::coins(full), 9), s2(CoinInstance::coins(prefix), 9);
  const RunResult r1 = run_game_of_coins(s1, sch);
  const RunResult r2 = run_game_of_coins(s2, sch);
  REQUIRE(r2.budget_trace.size() == 59);
  for (std::size_t i = 0; i < 59; ++i) {
    CHECK(r1.budget_trace[i].king == r2.budget_trace[i].king);
    CHECK(r1.budget_trace[i].tosses == r2.budget_trace[i].tosses);
    CHECK(r1.budget_trace[i].king_won == r2.budget_trace[i].king_won);
  }
}

TEST_CASE("same seed, same run") {
  std::vector<double> biases(100, 0.45);
  biases[40] = 0.75;
  const auto inst = CoinInstance::coins(biases);
  const auto sch = ChallengeSchedule::make(Family::main, 0.3, 0.1);
  StreamSession s1(inst, 77), s2(inst, 77);
  const RunResult a = run_game_of_coins(s1, sch);
  const RunResult b = run_game_of_coins(s2, sch);
  CHECK(a.chosen == b.chosen);
  CHECK(a.total_tosses == b.total_tosses);
  CHECK(a.king_changes == b.king_changes);
}

}
