#pragma once

// Problem instances and the metered stream session.
//
// A StreamSession is the only way an algorithm touches coins. It hands out one
// coin at a time in arrival order, kills the previous arrival unless the
// algorithm retained it, refuses to sample dead coins, and tallies every toss
// and the peak number of stored coins.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coinstream/rng.hpp"

namespace coinstream {

enum class InstanceKind { bernoulli_coin, bounded_arm, noisy_order };

enum class RewardLaw { bernoulli, uniform };

// Reward distribution of one arm. For `uniform`, rewards are drawn from
// [mean - w, mean + w] with w = min(width, mean, 1 - mean), i.e. the interval
// is clipped symmetrically so the support stays in [0,1] and the mean is kept.
struct ArmLaw {
  RewardLaw law = RewardLaw::bernoulli;
  double width = 0.0;
};

struct CoinInstance {
  InstanceKind kind = InstanceKind::bernoulli_coin;
  // Biases (coins), means (arms) or rank keys (noisy_order). Index = identity.
  std::vector<double> values;
  // arrival_order[pos] = index of the coin arriving at stream position pos.
  std::vector<std::size_t> arrival_order;
  // Declared gap between the gap_rank-th and the next distinct value.
  std::optional<double> gap;
  std::size_t gap_rank = 1;
  // Noisy comparison advantage; only meaningful for noisy_order.
  double gamma = 0.0;
  // Per-index reward laws for bounded_arm; empty means Bernoulli everywhere.
  std::vector<ArmLaw> arms;

  std::size_t size() const noexcept { return values.size(); }

  // Throws InvalidInstance if any invariant is violated.
  void validate() const;

  static CoinInstance coins(std::vector<double> biases,
                            std::vector<std::size_t> order = {},
                            std::optional<double> gap = std::nullopt);
  static CoinInstance bernoulli_arms(std::vector<double> means,
                                     std::vector<std::size_t> order = {});
  static CoinInstance noisy(std::vector<double> ranks, double gamma,
                            std::vector<std::size_t> order = {});
};

std::vector<std::size_t> identity_order(std::size_t n);

// Indices of the k largest values (ties broken by lower index).
std::vector<std::size_t> top_indices(const std::vector<double>& values,
                                     std::size_t k);

struct CoinHandle {
  std::size_t index = 0;
  std::uint64_t session_id = 0;

  friend bool operator==(const CoinHandle&, const CoinHandle&) = default;
};

struct Tally {
  std::uint64_t total_tosses = 0;
  std::vector<std::uint64_t> per_coin_tosses;
  std::size_t peak_held = 0;
  std::size_t current_held = 0;
};

class StreamSession {
 public:
  // held_limit bounds the number of stored coins (the arriving coin excluded).
  StreamSession(const CoinInstance& instance, std::uint64_t seed,
                std::optional<std::size_t> held_limit = std::nullopt);

  StreamSession(const StreamSession&) = delete;
  StreamSession& operator=(const StreamSession&) = delete;

  // Next coin in arrival order, or empty at stream end. The previous arrival
  // is killed unless hold() was called on it, in which case it now counts as
  // stored.
  std::optional<CoinHandle> advance();

  // Retain the current arrival past the next advance(). Idempotent for coins
  // that are already stored.
  void hold(CoinHandle h);

  void release(CoinHandle h);

  // Number of successes in m tosses. Bernoulli coins and Bernoulli arms only.
  std::uint64_t toss(CoinHandle h, std::uint64_t m);

  // Sum of m rewards (success count for Bernoulli laws).
  double pull_sum(CoinHandle h, std::uint64_t m);

  // m individual rewards in [0,1].
  std::vector<double> pull(CoinHandle h, std::uint64_t m);

  // One noisy comparison; returns the handle judged larger. Counts as one
  // sample, charged to `a`.
  CoinHandle compare_noisy(CoinHandle a, CoinHandle b);

  // m independent noisy comparisons; returns how many named `a` the larger.
  std::uint64_t compare_noisy_many(CoinHandle a, CoinHandle b, std::uint64_t m);

  // Pads the stream with zero-valued dummy coins until `total_length` coins
  // have arrived. Dummies get indices n, n+1, ...
  void pad_to(std::size_t total_length);

  bool is_dummy(CoinHandle h) const noexcept { return h.index >= instance_.size(); }
  bool alive(CoinHandle h) const noexcept;

  // Stream position at which coin `h` arrived.
  std::size_t position_of(CoinHandle h) const;

  // Algorithm-owned randomness (pivot draws etc.), uniform in [0, n).
  std::size_t uniform_index(std::size_t n);

  const Tally& tally() const noexcept { return tally_; }
  const CoinInstance& instance() const noexcept { return instance_; }
  std::size_t arrived() const noexcept { return next_pos_; }
  std::uint64_t id() const noexcept { return id_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  enum class State : std::uint8_t { unseen, current, pending, held, dead };

  void require_alive(CoinHandle h, const char* what) const;
  double value_of(std::size_t index) const;
  void ensure_coin(std::size_t index);
  void charge(std::size_t index, std::uint64_t m);
  CounterRng& rng_for(std::size_t index);

  CoinInstance instance_;
  std::uint64_t seed_;
  std::uint64_t id_;
  std::optional<std::size_t> held_limit_;
  std::size_t stream_length_;
  std::size_t next_pos_ = 0;
  std::optional<std::size_t> current_;
  std::vector<State> state_;
  std::vector<std::size_t> position_;
  std::vector<CounterRng> coin_rng_;
  CounterRng algo_rng_;
  Tally tally_;
};

std::string to_string(InstanceKind kind);
InstanceKind instance_kind_from_string(const std::string& s);

}  // namespace coinstream
