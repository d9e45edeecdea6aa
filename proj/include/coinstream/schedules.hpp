#pragma once

// Parameter formulas shared by every algorithm family, and the two-coin duel.
//
// Toss counts are ceilings of the real-valued formulas; budgets stay real.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "coinstream/oracle.hpp"

namespace coinstream {

inline constexpr double kDefaultC = 32.0;

enum class Family { main, topk, logn, loglogn, logstar, epsbest };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct ChallengeSchedule {
  Family family = Family::main;
  double delta = 0.1;
  // Delta, Delta_k, gamma or epsilon depending on the family.
  double gap = 0.1;
  double C = kDefaultC;
  std::size_t k = 1;
  std::optional<std::size_t> n_hint;

  void validate() const;

  static ChallengeSchedule make(Family f, double gap, double delta,
                                double C = kDefaultC, std::size_t k = 1);
};

// r_l: 3^l for main/topk/logn/loglogn; r_1 = 4, r_{l+1} = 2^{r_l} for
// logstar/epsbest. Throws LevelOverflow past 2^63.
std::uint64_t r_level(const ChallengeSchedule& s, unsigned level);

// Tosses per coin at level `level` (>= 1).
std::uint64_t s_level(const ChallengeSchedule& s, unsigned level);

// Per-coin budget increment b (main and topk only).
double budget_increment(const ChallengeSchedule& s);

// Top-level running-max sample count of the log log n algorithm.
std::uint64_t s_top(const ChallengeSchedule& s, std::size_t n);

// Counter bound c_l = 2^{r_l} / 2^{l-1}; saturates to UINT64_MAX when the
// value is not representable (the counter then never fills).
std::uint64_t c_level(const ChallengeSchedule& s, unsigned level);

// eps_l = eps / (10 * 2^{l-1}) for the epsbest family.
double eps_level(const ChallengeSchedule& s, unsigned level);

// Iterated floor(log2): applications needed to bring n down to <= 1.
unsigned log_star(std::uint64_t n);

// Smallest t >= 0 with 4^t >= x.
unsigned ceil_log4(double x);

// Number of bucket/counter levels t for the warm-up and eps-best families.
unsigned level_count(const ChallengeSchedule& s, std::size_t n);

struct DuelOutcome {
  enum class Side { first, second };
  Side winner = Side::second;
  double empirical_first = 0.0;
  double empirical_second = 0.0;
  std::uint64_t tosses_used = 0;
  bool tie = false;
};

// Tosses both coins m times (or, for noisy_order instances, performs m
// comparisons). `first` wins only on a strictly higher empirical value.
DuelOutcome duel(StreamSession& session, CoinHandle first, CoinHandle second,
                 std::uint64_t m);

// Empirical mean of m samples of one coin (reward mean for arms).
double sample_mean(StreamSession& session, CoinHandle h, std::uint64_t m);

using DuelFn =
    std::function<DuelOutcome(StreamSession&, CoinHandle, CoinHandle, std::uint64_t)>;

}  // namespace coinstream
