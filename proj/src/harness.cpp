#include "coinstream/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "coinstream/adapters.hpp"
#include "coinstream/errors.hpp"
#include "coinstream/game_of_coins.hpp"
#include "coinstream/randwalk.hpp"
#include "coinstream/top_k.hpp"
#include "coinstream/warmup.hpp"

namespace coinstream {

using nlohmann::json;

namespace {

bool is_walk(Algorithm a) {
  return a == Algorithm::walk_classical || a == Algorithm::walk_flex;
}

bool is_set_valued(Algorithm a) {
  return a == Algorithm::top_k || a == Algorithm::partition;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw InvalidConfig("trials must be >= 1");
  if (!(C > 0.0) || !std::isfinite(C)) throw InvalidConfig("C must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidConfig("delta must lie in (0,1)");
  if (is_walk(algorithm)) {
    if (algorithm == Algorithm::walk_classical && !(walk.p >= 0.0 && walk.p <= 1.0)) {
      throw InvalidConfig("walk.p must lie in [0,1]");
    }
    return;
  }
  if (instance.n < 1 && !instance.file) throw InvalidConfig("instance.n must be >= 1");
  if (instance.k < 1) throw InvalidConfig("k must be >= 1");
  if (is_set_valued(algorithm) && instance.k > 1 && !(delta < 0.5)) {
    throw InvalidConfig("top-k requires delta < 1/2");
  }
  if (algorithm == Algorithm::partition && !(instance.gap > 0.0 && instance.gap <= 0.5)) {
    throw InvalidConfig("partition gamma must lie in (0, 1/2]");
  }
  if (algorithm == Algorithm::eps_best && !(instance.gap > 0.0 && instance.gap < 1.0)) {
    throw InvalidConfig("eps must lie in (0,1)");
  }
  schedule_for(*this).validate();
}

bool Report::all_pass() const {
  return std::all_of(asserts.begin(), asserts.end(),
                     [](const AssertResult& a) { return a.pass; });
}

InstanceKind instance_kind_for(Algorithm a) {
  switch (a) {
    case Algorithm::partition: return InstanceKind::noisy_order;
    case Algorithm::eps_best: return InstanceKind::bounded_arm;
    default: return InstanceKind::bernoulli_coin;
  }
}

CoinInstance generate_instance(const InstanceSpec& spec, InstanceKind kind,
                               std::uint64_t seed) {
  const std::size_t n = spec.n;
  const std::size_t k = std::min(spec.k, n);
  if (n == 0) throw InvalidConfig("instance.n must be >= 1");
  CounterRng rng(stream_key(seed, rng_tag::instance, 0));

  // Values are built best-first: indices 0..k-1 hold the top values.
  std::vector<double> values(n);
  std::optional<double> gap;
  if (kind == InstanceKind::noisy_order) {
    for (std::size_t i = 0; i < n; ++i) values[i] = static_cast<double>(n - i);
  } else {
    switch (spec.profile) {
      case Profile::two_point: {
        const double low = spec.top - spec.gap;
        if (low < -1e-12) throw InvalidConfig("two_point needs top >= gap");
        for (std::size_t i = 0; i < n; ++i) values[i] = i < k ? spec.top : std::max(0.0, low);
        gap = spec.gap;
        break;
      }
      case Profile::descending_chain: {
        const double step = spec.chain_step.value_or(spec.gap / (4.0 * static_cast<double>(n)));
        if (spec.top - step * static_cast<double>(n - 1) < -1e-12) {
          throw InvalidConfig("descending_chain runs below zero");
        }
        for (std::size_t i = 0; i < n; ++i) {
          values[i] = std::max(0.0, spec.top - step * static_cast<double>(i));
        }
        break;
      }
      case Profile::uniform_random_respecting_gap: {
        const double spread = std::min(0.05, spec.top);
        const double high_floor = spec.top - spread;
        const double low_ceiling = high_floor - spec.gap;
        if (low_ceiling < 0.0) throw InvalidConfig("gap too large for uniform profile");
        for (std::size_t i = 0; i < n; ++i) {
          const double u = rng.uniform01();
          values[i] = i < k ? high_floor + spread * u : low_ceiling * u;
        }
        gap = spec.gap;
        break;
      }
    }
  }

  std::vector<std::size_t> order = identity_order(n);
  switch (spec.order) {
    case OrderPolicy::best_first:
      break;
    case OrderPolicy::best_last:
      std::rotate(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
      break;
    case OrderPolicy::worst_to_best:
      std::reverse(order.begin(), order.end());
      break;
    case OrderPolicy::random:
      std::shuffle(order.begin(), order.end(), rng);
      break;
  }

  CoinInstance inst;
  inst.kind = kind;
  inst.values = std::move(values);
  inst.arrival_order = std::move(order);
  if (kind == InstanceKind::noisy_order) {
    inst.gamma = spec.gap;
  } else if (gap && k < n) {
    inst.gap = gap;
    inst.gap_rank = k;
  }
  if (kind == InstanceKind::bounded_arm && spec.arm_law != RewardLaw::bernoulli) {
    inst.arms.assign(n, ArmLaw{spec.arm_law, spec.arm_width});
  }
  inst.validate();
  return inst;
}

ChallengeSchedule schedule_for(const ExperimentConfig& c) {
  const double g = c.instance.gap;
  const std::size_t k = c.instance.k;
  switch (c.algorithm) {
    case Algorithm::game_of_coins: return ChallengeSchedule::make(Family::main, g, c.delta, c.C);
    case Algorithm::log_n: return ChallengeSchedule::make(Family::logn, g, c.delta, c.C);
    case Algorithm::log_log_n: return ChallengeSchedule::make(Family::loglogn, g, c.delta, c.C);
    case Algorithm::log_star: return ChallengeSchedule::make(Family::logstar, g, c.delta, c.C);
    case Algorithm::top_k:
    case Algorithm::partition:
      return k == 1 ? ChallengeSchedule::make(Family::main, g, c.delta, c.C)
                    : ChallengeSchedule::make(Family::topk, g, c.delta, c.C, k);
    case Algorithm::eps_best: return ChallengeSchedule::make(Family::epsbest, g, c.delta, c.C);
    default: throw InvalidConfig("walks have no challenge schedule");
  }
}

double budget_for(const ExperimentConfig& c) {
  if (is_walk(c.algorithm)) return 0.0;
  const ChallengeSchedule s = schedule_for(c);
  if (s.family != Family::main && s.family != Family::topk) return 0.0;
  return budget_increment(s);
}

std::optional<std::size_t> memory_bound(const ExperimentConfig& c) {
  switch (c.algorithm) {
    case Algorithm::game_of_coins: return 1;
    case Algorithm::top_k:
    case Algorithm::partition:
      return c.instance.k == 1 ? 1 : (kBufferFactor + 1) * c.instance.k;
    case Algorithm::log_n:
    case Algorithm::log_log_n:
    case Algorithm::log_star:
    case Algorithm::eps_best:
      return stated_memory(schedule_for(c), c.instance.n);
    default: return std::nullopt;
  }
}

std::optional<std::size_t> effective_trial_cap(const ExperimentConfig& c) {
  if (!is_set_valued(c.algorithm) || c.instance.k < 2) return std::nullopt;
  if (c.trial_cap_auto) return default_trial_cap(c.instance.n, c.instance.k);
  return c.trial_cap;
}

bool score_argmax(const CoinInstance& inst, const std::vector<std::size_t>& chosen) {
  if (chosen.size() != 1 || chosen[0] >= inst.size()) return false;
  const double best = *std::max_element(inst.values.begin(), inst.values.end());
  return inst.values[chosen[0]] == best;
}

bool score_top_k(const CoinInstance& inst, const std::vector<std::size_t>& chosen,
                 std::size_t k) {
  if (chosen.size() != k || k > inst.size()) return false;
  std::vector<double> sorted = inst.values;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double kth = sorted[k - 1];
  std::vector<std::size_t> seen = chosen;
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) return false;
  return std::all_of(chosen.begin(), chosen.end(), [&](std::size_t i) {
    return i < inst.size() && inst.values[i] >= kth;
  });
}

bool score_eps_best(const CoinInstance& inst, const std::vector<std::size_t>& chosen,
                    double eps) {
  if (chosen.size() != 1 || chosen[0] >= inst.size()) return false;
  const double best = *std::max_element(inst.values.begin(), inst.values.end());
  return inst.values[chosen[0]] >= best - eps;
}

namespace {

void fill_king_diagnostics(const CoinInstance& inst, const StreamSession& session,
                           const RunResult& r, TrialRow& row) {
  const std::size_t best = top_indices(inst.values, 1).front();
  bool crowned = false;
  for (std::size_t pos = 0; pos < inst.size(); ++pos) {
    if (inst.arrival_order[pos] == best) {
      crowned = pos == 0;
      break;
    }
  }
  for (const ChallengeEvent& ev : r.budget_trace) {
    if (ev.challenger == best) {
      row.arrival_defeat = ev.king_won ? 1 : 0;
      crowned = !ev.king_won;
    }
  }
  (void)session;
  if (!crowned) return;
  row.dethroned = 0;
  for (const ChallengeEvent& ev : r.budget_trace) {
    if (ev.king == best && !ev.king_won) row.dethroned = 1;
  }
}

void fill_topk_diagnostics(const CoinInstance& inst, const RunResult& r, std::size_t k,
                           TrialRow& row) {
  if (!r.final_pool.empty()) {
    const auto top = top_indices(inst.values, k);
    row.pool_has_topk = std::all_of(top.begin(), top.end(), [&](std::size_t i) {
      return std::find(r.final_pool.begin(), r.final_pool.end(), i) != r.final_pool.end();
    }) ? 1 : 0;
  }
  if (!r.trial_log.empty()) {
    std::size_t pruned = 0;
    for (const TrialRecord& t : r.trial_log) pruned += t.discarded.size();
    row.mean_prune = static_cast<double>(pruned) / static_cast<double>(r.trial_log.size());
  }
}

}  // namespace

TrialRow run_single_trial(const ExperimentConfig& c, std::size_t trial_index) {
  TrialRow row;
  row.seed = c.base_seed + trial_index;
  try {
    if (c.algorithm == Algorithm::walk_classical || c.algorithm == Algorithm::walk_flex) {
      const WalkTrace tr =
          c.algorithm == Algorithm::walk_classical
              ? simulate_classical(c.walk.n, c.walk.p, row.seed)
              : simulate_flex(c.walk.n, flex_kappa(c.delta), c.C, c.delta, row.seed);
      const Positivity pos = check_positive(tr);
      row.success = pos.positive;
      row.walk_min = pos.minimum;
      row.tosses = tr.steps();
      return row;
    }

    const InstanceKind kind = instance_kind_for(c.algorithm);
    const CoinInstance inst =
        c.instance.file ? load_instance_json(*c.instance.file)
                        : generate_instance(c.instance, kind,
                                            stream_key(row.seed, rng_tag::harness, 0));
    if (inst.kind != kind) throw InvalidInstance("instance kind does not fit the algorithm");
    const std::size_t n = inst.size();
    const std::size_t k = c.instance.k;
    const ChallengeSchedule schedule = schedule_for(c);
    StreamSession session(inst, row.seed,
                          c.enforce_memory ? memory_bound(c) : std::nullopt);

    RunResult r;
    switch (c.algorithm) {
      case Algorithm::game_of_coins: r = run_game_of_coins(session, schedule); break;
      case Algorithm::log_n: r = run_log_n(session, schedule, n); break;
      case Algorithm::log_log_n: r = run_log_log_n(session, schedule, n); break;
      case Algorithm::log_star: r = run_log_star(session, schedule, n); break;
      case Algorithm::top_k:
        r = run_federated(session, schedule, k, {effective_trial_cap(c)});
        break;
      case Algorithm::partition:
        r = run_partition(session, schedule, k, {effective_trial_cap(c)});
        break;
      case Algorithm::eps_best:
        r = run_eps_best(session, EpsSchedule{c.instance.gap, c.delta}, n);
        break;
      default: break;
    }

    row.chosen = r.chosen;
    row.tosses = r.total_tosses;
    row.peak_held = r.peak_held;
    row.king_changes = r.king_changes;
    row.trials = r.trials;
    row.capped = r.capped;
    switch (c.algorithm) {
      case Algorithm::top_k:
      case Algorithm::partition: row.success = score_top_k(inst, r.chosen, k); break;
      case Algorithm::eps_best: row.success = score_eps_best(inst, r.chosen, c.instance.gap); break;
      default: row.success = score_argmax(inst, r.chosen); break;
    }
    if (!r.budget_trace.empty() || c.algorithm == Algorithm::game_of_coins) {
      fill_king_diagnostics(inst, session, r, row);
    }
    if (is_set_valued(c.algorithm) && k > 1) fill_topk_diagnostics(inst, r, k, row);
  } catch (const std::exception& e) {
    row.success = false;
    row.error = e.what();
    if (row.error.empty()) row.error = "error";
  }
  return row;
}

double wilson_half_width(double p, std::size_t n, double z) {
  if (n == 0) return 0.0;
  const double nn = static_cast<double>(n);
  const double z2 = z * z;
  return z / (1.0 + z2 / nn) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
}

double mc_slack(double p, std::size_t n) { return 3.0 * wilson_half_width(p, n, 1.0); }

json aggregate(const ExperimentConfig& c, const std::vector<TrialRow>& rows) {
  json a;
  const std::size_t n = rows.size();
  const double nn = n ? static_cast<double>(n) : 1.0;
  std::size_t successes = 0, errors = 0, capped = 0;
  std::uint64_t max_tosses = 0;
  double sum_tosses = 0.0, sum_trials = 0.0, sum_changes = 0.0, sum_walk_min = 0.0;
  std::size_t max_peak = 0, min_peak = std::numeric_limits<std::size_t>::max(), max_trials = 0;
  std::size_t ad_n = 0, ad_k = 0, dt_n = 0, dt_k = 0, fs_n = 0, fs_k = 0, pr_n = 0;
  double pr_sum = 0.0;
  for (const TrialRow& r : rows) {
    successes += r.success ? 1 : 0;
    errors += r.error.empty() ? 0 : 1;
    capped += r.capped ? 1 : 0;
    max_tosses = std::max(max_tosses, r.tosses);
    sum_tosses += static_cast<double>(r.tosses);
    sum_trials += static_cast<double>(r.trials);
    sum_changes += static_cast<double>(r.king_changes);
    sum_walk_min += r.walk_min;
    max_peak = std::max(max_peak, r.peak_held);
    min_peak = std::min(min_peak, r.peak_held);
    max_trials = std::max(max_trials, r.trials);
    if (r.arrival_defeat >= 0) {
      ++ad_n;
      ad_k += static_cast<std::size_t>(r.arrival_defeat);
    }
    if (r.dethroned >= 0) {
      ++dt_n;
      dt_k += static_cast<std::size_t>(r.dethroned);
    }
    if (r.pool_has_topk == 1) {
      ++fs_n;
      fs_k += r.success ? 0 : 1;
    }
    if (r.mean_prune >= 0.0) {
      ++pr_n;
      pr_sum += r.mean_prune;
    }
  }
  if (n == 0) min_peak = 0;
  const double rate = static_cast<double>(successes) / nn;
  const double hw95 = wilson_half_width(rate, n, 1.96);
  const double centre = (rate + 1.96 * 1.96 / (2.0 * nn)) / (1.0 + 1.96 * 1.96 / nn);

  a["trials"] = n;
  a["successes"] = successes;
  a["success_rate"] = rate;
  a["wilson95_low"] = std::max(0.0, centre - hw95);
  a["wilson95_high"] = std::min(1.0, centre + hw95);
  a["errors"] = errors;
  a["error_rate"] = static_cast<double>(errors) / nn;
  a["max_tosses"] = max_tosses;
  a["mean_tosses"] = sum_tosses / nn;
  a["max_peak_held"] = max_peak;
  a["min_peak_held"] = min_peak;
  a["mean_king_changes"] = sum_changes / nn;
  a["mean_trials"] = sum_trials / nn;
  a["max_trials"] = max_trials;
  a["capped_rate"] = static_cast<double>(capped) / nn;
  a["arrival_defeat_n"] = ad_n;
  a["arrival_defeat_rate"] = ad_n ? static_cast<double>(ad_k) / static_cast<double>(ad_n) : 0.0;
  a["dethronement_n"] = dt_n;
  a["dethronement_rate"] = dt_n ? static_cast<double>(dt_k) / static_cast<double>(dt_n) : 0.0;
  a["final_step_n"] = fs_n;
  a["final_step_error_rate"] = fs_n ? static_cast<double>(fs_k) / static_cast<double>(fs_n) : 0.0;
  a["mean_prune"] = pr_n ? pr_sum / static_cast<double>(pr_n) : 0.0;
  if (is_walk(c.algorithm)) {
    a["nonpositive_rate"] = 1.0 - rate;
    a["mean_walk_min"] = sum_walk_min / nn;
  }

  const double b = budget_for(c);
  if (b > 0.0) {
    const double envelope = 4.0 * static_cast<double>(c.instance.n) * b;
    a["budget_increment"] = b;
    a["toss_envelope"] = envelope;
    a["max_toss_ratio"] = static_cast<double>(max_tosses) / envelope;
  }
  if (const auto m = memory_bound(c)) a["memory_bound"] = *m;
  if (is_set_valued(c.algorithm) && c.instance.k > 1) {
    a["trial_bound"] = 200.0 * static_cast<double>(c.instance.n) /
                       static_cast<double>(c.instance.k);
    if (const auto cap = effective_trial_cap(c)) a["trial_cap"] = *cap;
  }
  return a;
}

double auto_threshold(const ExperimentConfig& c, const AssertSpec& a, const json& agg) {
  const std::string& m = a.metric;
  const auto count = [&](const char* key) { return agg.value(key, std::size_t{0}); };
  if (m == "success_rate") {
    const double ref = 1.0 - c.delta;
    return ref - mc_slack(ref, c.trials);
  }
  if (m == "arrival_defeat_rate") return c.delta / 2 + mc_slack(c.delta / 2, count("arrival_defeat_n"));
  if (m == "dethronement_rate") return c.delta / 2 + mc_slack(c.delta / 2, count("dethronement_n"));
  if (m == "final_step_error_rate") return c.delta / 2 + mc_slack(c.delta / 2, count("final_step_n"));
  if (m == "max_tosses") return agg.value("toss_envelope", 0.0);
  if (m == "max_toss_ratio") return 1.0;
  if (m == "max_peak_held" || m == "min_peak_held") {
    const auto bound = memory_bound(c);
    if (!bound) throw InvalidConfig("no memory bound for this algorithm");
    return static_cast<double>(*bound);
  }
  if (m == "mean_trials") return agg.value("trial_bound", 0.0);
  if (m == "max_trials") return static_cast<double>(agg.value("trial_cap", std::size_t{0}));
  if (m == "nonpositive_rate") return 2.0 * (1.0 - c.walk.p);
  if (m == "error_rate" || m == "capped_rate") return 0.0;
  throw InvalidConfig("no automatic threshold for metric '" + m + "'");
}

std::vector<AssertResult> evaluate_asserts(const ExperimentConfig& c, const json& agg) {
  std::vector<AssertResult> out;
  for (const AssertSpec& s : c.asserts) {
    AssertResult r;
    r.spec = s;
    r.threshold = s.value ? *s.value : auto_threshold(c, s, agg);
    if (!agg.contains(s.metric) || !agg.at(s.metric).is_number()) {
      r.observed = std::numeric_limits<double>::quiet_NaN();
      r.pass = false;
    } else {
      r.observed = agg.at(s.metric).get<double>();
      if (s.op == "<=") r.pass = r.observed <= r.threshold;
      else if (s.op == ">=") r.pass = r.observed >= r.threshold;
      else if (s.op == "==") r.pass = r.observed == r.threshold;
      else r.pass = std::abs(r.observed - r.threshold) <= s.tolerance;
    }
    out.push_back(r);
  }
  return out;
}

namespace {

Report make_report(const ExperimentConfig& c, std::vector<TrialRow> rows) {
  Report rep;
  rep.config = c;
  rep.config_hash = config_hash(c);
  rep.rows = std::move(rows);
  rep.aggregates = aggregate(c, rep.rows);
  rep.asserts = evaluate_asserts(c, rep.aggregates);
  return rep;
}

}  // namespace

Report run_experiment_serial(const ExperimentConfig& c) {
  c.validate();
  std::vector<TrialRow> rows(c.trials);
  for (std::size_t i = 0; i < c.trials; ++i) rows[i] = run_single_trial(c, i);
  return make_report(c, std::move(rows));
}

Report run_experiment(const ExperimentConfig& c) {
  c.validate();
  std::vector<TrialRow> rows(c.trials);
#ifdef _OPENMP
  const int threads = env_thread_count().value_or(omp_get_max_threads());
  const auto total = static_cast<long long>(c.trials);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long i = 0; i < total; ++i) {
    rows[static_cast<std::size_t>(i)] = run_single_trial(c, static_cast<std::size_t>(i));
  }
#else
  for (std::size_t i = 0; i < c.trials; ++i) rows[i] = run_single_trial(c, i);
#endif
  return make_report(c, std::move(rows));
}

SweepResult sweep_C(const ExperimentConfig& c, const std::vector<double>& grid) {
  SweepResult out;
  for (double C : grid) {
    ExperimentConfig cc = c;
    cc.C = C;
    const Report r = run_experiment(cc);
    SweepRow row;
    row.C = C;
    row.success_rate = r.aggregates.at("success_rate").get<double>();
    row.max_tosses = r.aggregates.at("max_tosses").get<std::uint64_t>();
    const double ref = 1.0 - c.delta;
    row.pass = row.success_rate >= ref - mc_slack(ref, c.trials);
    if (row.pass && (!out.smallest_passing || C < *out.smallest_passing)) {
      out.smallest_passing = C;
    }
    out.rows.push_back(row);
  }
  return out;
}

std::optional<int> env_thread_count() {
  const char* v = std::getenv("COINSTREAM_THREADS");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || n < 1) return std::nullopt;
  return static_cast<int>(n);
}

}  // namespace coinstream
