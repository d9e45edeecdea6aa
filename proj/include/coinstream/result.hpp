#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace coinstream {

// One arriving-coin challenge against the king.
struct ChallengeEvent {
  std::size_t position = 0;    // stream position of the challenger
  std::size_t challenger = 0;  // coin index
  std::size_t king = 0;        // coin index of the king entering the challenge
  double budget_before = 0.0;  // after the +b increment
  double budget_after = 0.0;   // after paying for every affordable level
  // s_l of the level the king could not afford (0 when the king won).
  double unaffordable = 0.0;
  std::uint64_t tosses = 0;
  unsigned levels = 0;  // duels fought
  bool king_won = false;
};

struct TrialRecord {
  enum class Outcome { discard, swap };
  std::size_t pivot = 0;
  std::size_t defeats = 0;  // D
  Outcome outcome = Outcome::discard;
  std::vector<std::size_t> discarded;
  std::optional<std::size_t> swapped_king;
  std::uint64_t tosses = 0;
};

struct RunResult {
  std::vector<std::size_t> chosen;
  std::uint64_t total_tosses = 0;
  std::size_t peak_held = 0;
  std::size_t king_changes = 0;
  std::vector<ChallengeEvent> budget_trace;

  // top-k only
  std::size_t trials = 0;
  bool capped = false;
  std::vector<TrialRecord> trial_log;
  std::vector<std::size_t> final_pool;

  std::optional<bool> success;
};

}  // namespace coinstream
