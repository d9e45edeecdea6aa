#include "coinstream/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "coinstream/errors.hpp"

namespace coinstream {

namespace {

std::atomic<std::uint64_t> g_next_session_id{1};

constexpr double kGapTolerance = 1e-12;

}  // namespace

std::vector<std::size_t> identity_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

std::vector<std::size_t> top_indices(const std::vector<double>& values,
                                     std::size_t k) {
  std::vector<std::size_t> idx = identity_order(values.size());
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return values[a] > values[b];
  });
  idx.resize(std::min(k, idx.size()));
  return idx;
}

void CoinInstance::validate() const {
  const std::size_t n = values.size();
  if (arrival_order.size() != n) {
    throw InvalidInstance("arrival_order length differs from instance size");
  }
  std::vector<bool> seen(n, false);
  for (std::size_t idx : arrival_order) {
    if (idx >= n || seen[idx]) {
      throw InvalidInstance("arrival_order is not a permutation");
    }
    seen[idx] = true;
  }

  switch (kind) {
    case InstanceKind::bernoulli_coin:
    case InstanceKind::bounded_arm:
      for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw InvalidInstance("bias/mean outside [0,1]");
        }
      }
      break;
    case InstanceKind::noisy_order: {
      if (!(gamma > 0.0 && gamma <= 0.5)) {
        throw InvalidInstance("noisy_order requires gamma in (0, 1/2]");
      }
      std::vector<double> sorted = values;
      std::sort(sorted.begin(), sorted.end());
      for (double v : sorted) {
        if (!std::isfinite(v)) throw InvalidInstance("rank keys must be finite");
      }
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InvalidInstance("rank keys must be distinct");
      }
      break;
    }
  }

  if (kind == InstanceKind::bounded_arm && !arms.empty()) {
    if (arms.size() != n) throw InvalidInstance("arms length differs from means");
    for (const ArmLaw& a : arms) {
      if (a.width < 0.0) throw InvalidInstance("negative uniform width");
    }
  }

  if (gap) {
    if (!(*gap > 0.0)) throw InvalidInstance("declared gap must be positive");
    std::vector<double> distinct = values;
    std::sort(distinct.begin(), distinct.end(), std::greater<>());
    if (gap_rank <= 1) {
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      if (distinct.size() >= 2 && distinct[0] - distinct[1] < *gap - kGapTolerance) {
        throw InvalidInstance("largest bias does not exceed the next distinct one by gap");
      }
    } else if (distinct.size() > gap_rank &&
               distinct[gap_rank - 1] - distinct[gap_rank] < *gap - kGapTolerance) {
      throw InvalidInstance("k-th and (k+1)-th biases are closer than the declared gap");
    }
  }
}

CoinInstance CoinInstance::coins(std::vector<double> biases,
                                 std::vector<std::size_t> order,
                                 std::optional<double> gap) {
  CoinInstance inst;
  inst.kind = InstanceKind::bernoulli_coin;
  if (order.empty()) order = identity_order(biases.size());
  inst.values = std::move(biases);
  inst.arrival_order = std::move(order);
  inst.gap = gap;
  inst.validate();
  return inst;
}

CoinInstance CoinInstance::bernoulli_arms(std::vector<double> means,
                                          std::vector<std::size_t> order) {
  CoinInstance inst;
  inst.kind = InstanceKind::bounded_arm;
  if (order.empty()) order = identity_order(means.size());
  inst.values = std::move(means);
  inst.arrival_order = std::move(order);
  inst.validate();
  return inst;
}

CoinInstance CoinInstance::noisy(std::vector<double> ranks, double gamma,
                                 std::vector<std::size_t> order) {
  CoinInstance inst;
  inst.kind = InstanceKind::noisy_order;
  if (order.empty()) order = identity_order(ranks.size());
  inst.values = std::move(ranks);
  inst.arrival_order = std::move(order);
  inst.gamma = gamma;
  inst.validate();
  return inst;
}

StreamSession::StreamSession(const CoinInstance& instance, std::uint64_t seed,
                             std::optional<std::size_t> held_limit)
    : instance_(instance),
      seed_(seed),
      id_(g_next_session_id.fetch_add(1, std::memory_order_relaxed)),
      held_limit_(held_limit),
      stream_length_(instance.size()),
      algo_rng_(stream_key(seed, rng_tag::algorithm, 0)) {
  instance_.validate();
  if (instance.size() > 0) ensure_coin(instance.size() - 1);
}

void StreamSession::ensure_coin(std::size_t index) {
  if (index < state_.size()) return;
  const std::size_t old = state_.size();
  state_.resize(index + 1, State::unseen);
  position_.resize(index + 1, 0);
  tally_.per_coin_tosses.resize(index + 1, 0);
  coin_rng_.resize(index + 1);
  for (std::size_t i = old; i <= index; ++i) {
    coin_rng_[i] = CounterRng(stream_key(seed_, rng_tag::coin, i));
  }
}

void StreamSession::pad_to(std::size_t total_length) {
  stream_length_ = std::max(stream_length_, total_length);
}

std::optional<CoinHandle> StreamSession::advance() {
  if (current_) {
    State& s = state_[*current_];
    if (s == State::pending) {
      s = State::held;
      ++tally_.current_held;
      if (held_limit_ && tally_.current_held > *held_limit_) {
        throw HandleLimitExceeded("retaining coin " + std::to_string(*current_) +
                                  " exceeds held_limit " +
                                  std::to_string(*held_limit_));
      }
      tally_.peak_held = std::max(tally_.peak_held, tally_.current_held);
    } else if (s == State::current) {
      s = State::dead;
    }
    current_.reset();
  }
  if (next_pos_ >= stream_length_) return std::nullopt;

  const std::size_t pos = next_pos_++;
  const std::size_t index = pos < instance_.size() ? instance_.arrival_order[pos] : pos;
  ensure_coin(index);
  state_[index] = State::current;
  position_[index] = pos;
  current_ = index;
  return CoinHandle{index, id_};
}

bool StreamSession::alive(CoinHandle h) const noexcept {
  if (h.session_id != id_ || h.index >= state_.size()) return false;
  const State s = state_[h.index];
  return s == State::current || s == State::pending || s == State::held;
}

void StreamSession::require_alive(CoinHandle h, const char* what) const {
  if (!alive(h)) {
    throw SampleAfterRelease(std::string(what) + " on coin " +
                             std::to_string(h.index) + " which is not in memory");
  }
}

void StreamSession::hold(CoinHandle h) {
  require_alive(h, "hold");
  if (state_[h.index] == State::current) state_[h.index] = State::pending;
}

void StreamSession::release(CoinHandle h) {
  if (h.session_id != id_ || h.index >= state_.size()) {
    throw SampleAfterRelease("release of a foreign handle");
  }
  State& s = state_[h.index];
  if (s == State::dead) {
    throw DoubleRelease("coin " + std::to_string(h.index) + " already released");
  }
  if (s == State::unseen) throw SampleAfterRelease("release of a coin not yet arrived");
  if (s == State::held) --tally_.current_held;
  s = State::dead;
}

std::size_t StreamSession::position_of(CoinHandle h) const {
  if (h.session_id != id_ || h.index >= state_.size() || state_[h.index] == State::unseen) {
    throw SampleAfterRelease("position of a coin that never arrived");
  }
  return position_[h.index];
}

double StreamSession::value_of(std::size_t index) const {
  return index < instance_.size() ? instance_.values[index] : 0.0;
}

CounterRng& StreamSession::rng_for(std::size_t index) { return coin_rng_[index]; }

void StreamSession::charge(std::size_t index, std::uint64_t m) {
  tally_.total_tosses += m;
  tally_.per_coin_tosses[index] += m;
}

std::uint64_t StreamSession::toss(CoinHandle h, std::uint64_t m) {
  require_alive(h, "toss");
  if (instance_.kind == InstanceKind::noisy_order) {
    throw Error("toss on a noisy_order instance; use compare_noisy");
  }
  if (instance_.kind == InstanceKind::bounded_arm && !instance_.arms.empty() &&
      h.index < instance_.size() &&
      instance_.arms[h.index].law != RewardLaw::bernoulli) {
    throw Error("toss on a non-Bernoulli arm; use pull");
  }
  charge(h.index, m);
  const double p = value_of(h.index);
  if (m == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return m;
  std::binomial_distribution<std::uint64_t> dist(m, p);
  return dist(rng_for(h.index));
}

double StreamSession::pull_sum(CoinHandle h, std::uint64_t m) {
  require_alive(h, "pull");
  if (instance_.kind != InstanceKind::bounded_arm || instance_.arms.empty() ||
      h.index >= instance_.size() ||
      instance_.arms[h.index].law == RewardLaw::bernoulli) {
    return static_cast<double>(toss(h, m));
  }
  charge(h.index, m);
  const double mean = value_of(h.index);
  const double w = std::min({instance_.arms[h.index].width, mean, 1.0 - mean});
  CounterRng& rng = rng_for(h.index);
  double sum = 0.0;
  for (std::uint64_t i = 0; i < m; ++i) sum += mean - w + 2.0 * w * rng.uniform01();
  return sum;
}

std::vector<double> StreamSession::pull(CoinHandle h, std::uint64_t m) {
  require_alive(h, "pull");
  std::vector<double> out;
  out.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) out.push_back(pull_sum(h, 1));
  return out;
}

std::uint64_t StreamSession::compare_noisy_many(CoinHandle a, CoinHandle b,
                                                std::uint64_t m) {
  require_alive(a, "compare");
  require_alive(b, "compare");
  if (instance_.kind != InstanceKind::noisy_order) {
    throw Error("compare_noisy requires a noisy_order instance");
  }
  charge(a.index, m);
  if (m == 0) return 0;
  // Dummies rank below every real element.
  const auto rank = [&](std::size_t i) {
    return i < instance_.size() ? instance_.values[i]
                                : -std::numeric_limits<double>::infinity();
  };
  const bool a_larger = rank(a.index) > rank(b.index);
  const double p_correct = 0.5 + instance_.gamma;
  std::uint64_t correct = m;
  if (p_correct < 1.0) {
    std::binomial_distribution<std::uint64_t> dist(m, p_correct);
    correct = dist(rng_for(a.index));
  }
  return a_larger ? correct : m - correct;
}

CoinHandle StreamSession::compare_noisy(CoinHandle a, CoinHandle b) {
  return compare_noisy_many(a, b, 1) == 1 ? a : b;
}

std::size_t StreamSession::uniform_index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(algo_rng_);
}

std::string to_string(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::bernoulli_coin: return "bernoulli_coin";
    case InstanceKind::bounded_arm: return "bounded_arm";
    case InstanceKind::noisy_order: return "noisy_order";
  }
  return "?";
}

InstanceKind instance_kind_from_string(const std::string& s) {
  if (s == "bernoulli_coin") return InstanceKind::bernoulli_coin;
  if (s == "bounded_arm") return InstanceKind::bounded_arm;
  if (s == "noisy_order") return InstanceKind::noisy_order;
  throw InvalidInstance("unknown instance kind '" + s + "'");
}

}  // namespace coinstream
