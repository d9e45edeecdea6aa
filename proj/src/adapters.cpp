#include "coinstream/adapters.hpp"

#include <algorithm>
#include <cmath>

#include "coinstream/errors.hpp"
#include "coinstream/game_of_coins.hpp"
#include "coinstream/warmup.hpp"

namespace coinstream {

void EpsSchedule::validate() const {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidSchedule("eps must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidSchedule("delta must lie in (0,1)");
}

ChallengeSchedule EpsSchedule::schedule() const {
  validate();
  return ChallengeSchedule::make(Family::epsbest, eps, delta);
}

double EpsSchedule::eps_level(unsigned level) const {
  return coinstream::eps_level(schedule(), level);
}

double EpsSchedule::beta(unsigned level) const {
  const double e = eps_level(level);
  return 1.0 / (e * e);
}

std::uint64_t EpsSchedule::r(unsigned level) const { return r_level(schedule(), level); }
std::uint64_t EpsSchedule::s(unsigned level) const { return s_level(schedule(), level); }
std::uint64_t EpsSchedule::c(unsigned level) const { return c_level(schedule(), level); }

unsigned EpsSchedule::levels(std::size_t n) const { return level_count(schedule(), n); }

RunResult run_partition(StreamSession& session, const ChallengeSchedule& schedule,
                        std::size_t k, const FederatedOptions& options) {
  const CoinInstance& inst = session.instance();
  if (inst.kind != InstanceKind::noisy_order) {
    throw InvalidInstance("partition needs a noisy_order instance");
  }
  if (std::abs(schedule.gap - inst.gamma) > 1e-12) {
    throw InvalidSchedule("partition schedule gap must equal the instance gamma");
  }
  if (k == 1) {
    const ChallengeSchedule main =
        ChallengeSchedule::make(Family::main, schedule.gap, schedule.delta, schedule.C);
    return run_game_of_coins(session, main);
  }
  return run_federated(session, schedule, k, options);
}

RunResult run_eps_best(StreamSession& session, const EpsSchedule& schedule,
                       std::size_t n) {
  if (session.instance().kind != InstanceKind::bounded_arm) {
    throw InvalidInstance("eps-best needs a bounded_arm instance");
  }
  return run_champion_ladder(session, schedule.schedule(), n);
}

double chain_counterexample_probe(const CoinInstance& instance,
                                  const ChallengeSchedule& schedule_main, double eps,
                                  std::size_t trials, std::uint64_t base_seed) {
  if (trials == 0) return 0.0;
  const double best = *std::max_element(instance.values.begin(), instance.values.end());
  std::size_t failures = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    StreamSession session(instance, base_seed + i);
    const RunResult r = run_game_of_coins(session, schedule_main);
    if (instance.values[r.chosen.front()] < best - eps) ++failures;
  }
  return static_cast<double>(failures) / static_cast<double>(trials);
}

}  // namespace coinstream
