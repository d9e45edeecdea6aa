#pragma once

// Noisy-comparison partition and eps-best arm selection, built on the coin
// algorithms.

#include <cstddef>
#include <cstdint>

#include "coinstream/result.hpp"
#include "coinstream/schedules.hpp"
#include "coinstream/top_k.hpp"

namespace coinstream {

// Per-level parameters of the eps-best ladder.
struct EpsSchedule {
  double eps = 0.1;
  double delta = 0.1;

  void validate() const;
  ChallengeSchedule schedule() const;

  double eps_level(unsigned level) const;
  double beta(unsigned level) const;
  std::uint64_t r(unsigned level) const;
  std::uint64_t s(unsigned level) const;
  std::uint64_t c(unsigned level) const;
  unsigned levels(std::size_t n) const;
};

// Top-k elements of a noisy_order instance. The schedule's gap plays the role
// of gamma; duels become majority votes over noisy comparisons. k = 1 runs
// the single-coin algorithm.
RunResult run_partition(StreamSession& session, const ChallengeSchedule& schedule,
                        std::size_t k, const FederatedOptions& options = {});

RunResult run_eps_best(StreamSession& session, const EpsSchedule& schedule,
                       std::size_t n);

// Fraction of `trials` seeded runs (seeds base_seed, base_seed+1, ...) in
// which the single-coin algorithm, given gap := eps, returns an arm that is
// not eps-best.
double chain_counterexample_probe(const CoinInstance& instance,
                                  const ChallengeSchedule& schedule_main, double eps,
                                  std::size_t trials, std::uint64_t base_seed);

}  // namespace coinstream
