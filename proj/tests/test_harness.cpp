#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "coinstream/errors.hpp"
#include "coinstream/harness.hpp"
#include "coinstream/top_k.hpp"
#include "oracles.hpp"

using namespace coinstream;
using nlohmann::json;

namespace {

ExperimentConfig small_goc(std::size_t trials = 40) {
  ExperimentConfig c;
  c.name = "t";
  c.algorithm = Algorithm::game_of_coins;
  c.instance.n = 60;
  c.instance.top = 0.9;
  c.instance.gap = 0.3;
  c.instance.order = OrderPolicy::random;
  c.trials = trials;
  c.base_seed = 500;
  return c;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("enum strings round-trip") {
  for (Algorithm a : {Algorithm::game_of_coins, Algorithm::log_n, Algorithm::log_log_n,
                      Algorithm::log_star, Algorithm::top_k, Algorithm::partition,
                      Algorithm::eps_best, Algorithm::walk_classical, Algorithm::walk_flex}) {
    CHECK(algorithm_from_string(to_string(a)) == a);
  }
  for (Profile p : {Profile::two_point, Profile::descending_chain,
                    Profile::uniform_random_respecting_gap}) {
    CHECK(profile_from_string(to_string(p)) == p);
  }
  for (OrderPolicy o : {OrderPolicy::best_first, OrderPolicy::best_last, OrderPolicy::random,
                        OrderPolicy::worst_to_best}) {
    CHECK(order_from_string(to_string(o)) == o);
  }
  CHECK_THROWS_AS(algorithm_from_string("bogus"), InvalidConfig);
}

TEST_CASE("config json round-trip and hash") {
  ExperimentConfig c = small_goc();
  c.asserts = {{"success_rate", ">=", std::nullopt, 0.0}, {"max_peak_held", "==", 1.0, 0.0}};
  const ExperimentConfig back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(config_hash(back) == config_hash(c));
  ExperimentConfig d = c;
  d.delta = 0.05;
  CHECK(config_hash(d) != config_hash(c));
}

TEST_CASE("overrides use dotted keys and json values") {
  json doc = config_to_json(small_goc());
  apply_override(doc, "instance.n=123");
  apply_override(doc, "instance.order=best_last");
  apply_override(doc, "C=8.5");
  const ExperimentConfig c = config_from_json(doc);
  CHECK(c.instance.n == 123);
  CHECK(c.instance.order == OrderPolicy::best_last);
  CHECK(c.C == 8.5);
  CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), InvalidConfig);
}

TEST_CASE("bad configs are rejected") {
  ExperimentConfig c = small_goc();
  c.delta = 1.5;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  json doc = config_to_json(small_goc());
  doc["algorithm"] = "nope";
  CHECK_THROWS_AS(config_from_json(doc), InvalidConfig);
}

TEST_CASE("every shipped config parses and validates") {
  namespace fs = std::filesystem;
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(COINSTREAM_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const ExperimentConfig c = load_config(entry.path().string());
    CHECK_NOTHROW(c.validate());
    CHECK_FALSE(c.asserts.empty());
    ++count;
  }
  CHECK(count >= 10);
}

TEST_CASE("generated instances respect profile and order") {
  InstanceSpec spec;
  spec.n = 10;
  spec.top = 0.9;
  spec.gap = 0.3;
  spec.k = 2;
  spec.profile = Profile::two_point;

  spec.order = OrderPolicy::best_first;
  auto inst = generate_instance(spec, InstanceKind::bernoulli_coin, 1);
  CHECK(inst.values[inst.arrival_order.front()] == 0.9);
  CHECK(inst.gap == std::optional<double>{0.3});
  CHECK(inst.gap_rank == 2);

  spec.order = OrderPolicy::best_last;
  inst = generate_instance(spec, InstanceKind::bernoulli_coin, 1);
  CHECK(inst.values[inst.arrival_order.back()] == 0.9);
  CHECK(inst.values[inst.arrival_order[spec.n - 2]] == 0.9);
  CHECK(inst.values[inst.arrival_order.front()] == doctest::Approx(0.6));

  spec.order = OrderPolicy::worst_to_best;
  spec.profile = Profile::descending_chain;
  spec.k = 1;
  inst = generate_instance(spec, InstanceKind::bounded_arm, 1);
  for (std::size_t p = 1; p < spec.n; ++p) {
    CHECK(inst.values[inst.arrival_order[p]] > inst.values[inst.arrival_order[p - 1]]);
  }
  CHECK(inst.values[0] - inst.values[1] == doctest::Approx(0.3 / 40.0));

  spec.profile = Profile::uniform_random_respecting_gap;
  spec.order = OrderPolicy::random;
  spec.n = 200;
  inst = generate_instance(spec, InstanceKind::bernoulli_coin, 4);
  const auto sorted_vals = [&] {
    auto v = inst.values;
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
  }();
  CHECK(sorted_vals[0] - sorted_vals[1] >= 0.3);

  const auto noisy = generate_instance(spec, InstanceKind::noisy_order, 4);
  CHECK(noisy.gamma == 0.3);
  CHECK(noisy.kind == InstanceKind::noisy_order);
}

TEST_CASE("instance json round-trip") {
  InstanceSpec spec;
  spec.n = 12;
  spec.k = 3;
  spec.gap = 0.2;
  const auto inst = generate_instance(spec, InstanceKind::bernoulli_coin, 9);
  const auto back = instance_from_json(instance_to_json(inst));
  CHECK(back.values == inst.values);
  CHECK(back.arrival_order == inst.arrival_order);
  CHECK(back.gap == inst.gap);
  CHECK(back.gap_rank == inst.gap_rank);
}

TEST_CASE("scoring") {
  const auto inst = CoinInstance::coins({0.5, 0.9, 0.7, 0.9});
  CHECK(score_argmax(inst, {1}));
  CHECK(score_argmax(inst, {3}));
  CHECK_FALSE(score_argmax(inst, {2}));
  CHECK_FALSE(score_argmax(inst, {1, 3}));
  CHECK(score_top_k(inst, {3, 1}, 2));
  CHECK_FALSE(score_top_k(inst, {1, 1}, 2));
  CHECK_FALSE(score_top_k(inst, {1, 2}, 2));
  CHECK(score_eps_best(inst, {2}, 0.2));
  CHECK_FALSE(score_eps_best(inst, {0}, 0.2));
}

TEST_CASE("memory bounds and trial caps") {
  ExperimentConfig c = small_goc();
  CHECK(memory_bound(c) == std::optional<std::size_t>{1});
  c.algorithm = Algorithm::top_k;
  c.instance.k = 4;
  c.instance.n = 300;
  CHECK(memory_bound(c) == std::optional<std::size_t>{44});
  CHECK(effective_trial_cap(c) == std::optional<std::size_t>{default_trial_cap(300, 4)});
  c.trial_cap_auto = false;
  c.trial_cap = 7;
  CHECK(effective_trial_cap(c) == std::optional<std::size_t>{7});
  c.algorithm = Algorithm::walk_flex;
  CHECK_FALSE(memory_bound(c).has_value());
}

TEST_CASE("wilson half-width against the closed form") {
  for (double p : {0.0, 0.2, 0.5, 0.99}) {
    for (std::size_t n : {1u, 10u, 500u, 10000u}) {
      CHECK(wilson_half_width(p, n) == doctest::Approx(oracle::wilson_half_width(p, n, 1.0)));
      CHECK(mc_slack(p, n) == doctest::Approx(3 * oracle::wilson_half_width(p, n, 1.0)));
    }
  }
  CHECK(wilson_half_width(0.5, 0) == 0.0);
}

TEST_CASE("errors are recorded per trial") {
  ExperimentConfig c = small_goc(3);
  c.instance.top = 0.2;  // two_point needs top >= gap
  const Report r = run_experiment_serial(c);
  REQUIRE(r.rows.size() == 3);
  for (const TrialRow& row : r.rows) {
    CHECK_FALSE(row.error.empty());
    CHECK_FALSE(row.success);
  }
  CHECK(r.aggregates.at("error_rate").get<double>() == 1.0);
}

TEST_CASE("serial and parallel runs give identical rows") {
  const ExperimentConfig c = small_goc(24);
  const Report a = run_experiment_serial(c);
  const Report b = run_experiment(c);
  CHECK(a.rows == b.rows);
  CHECK(a.aggregates == b.aggregates);
  CHECK(a.config_hash == b.config_hash);
}

TEST_CASE("rows survive a CSV round-trip with identical aggregates") {
  ExperimentConfig c = small_goc(20);
  c.algorithm = Algorithm::top_k;
  c.instance.n = 80;
  c.instance.k = 2;
  c.instance.gap = 0.6;
  c.trials = 6;
  const Report r = run_experiment_serial(c);
  std::stringstream ss;
  write_rows_csv(ss, r.rows, r.config_hash);
  const auto back = read_rows_csv(ss);
  CHECK(back == r.rows);
  CHECK(aggregate(c, back) == r.aggregates);
}

TEST_CASE("auto thresholds") {
  ExperimentConfig c = small_goc(100);
  const Report r = run_experiment_serial(c);
  const json& a = r.aggregates;
  const AssertSpec success{"success_rate", ">=", std::nullopt, 0.0};
  CHECK(auto_threshold(c, success, a) ==
        doctest::Approx(1 - c.delta - 3 * oracle::wilson_half_width(1 - c.delta, 100, 1.0)));
  const AssertSpec peak{"max_peak_held", "==", std::nullopt, 0.0};
  CHECK(auto_threshold(c, peak, a) == 1.0);
  const AssertSpec ratio{"max_toss_ratio", "<=", std::nullopt, 0.0};
  CHECK(auto_threshold(c, ratio, a) == 1.0);
  CHECK(a.at("toss_envelope").get<double>() == doctest::Approx(4.0 * 60 * budget_for(c)));
}

TEST_CASE("assert operators") {
  ExperimentConfig c = small_goc(10);
  c.asserts = {{"success_rate", ">=", 0.0, 0.0},
               {"error_rate", "==", 0.0, 0.0},
               {"max_peak_held", "<=", 0.5, 0.0},
               {"success_rate", "within", 1.0, 0.5}};
  const Report r = run_experiment_serial(c);
  REQUIRE(r.asserts.size() == 4);
  CHECK(r.asserts[0].pass);
  CHECK(r.asserts[1].pass);
  CHECK_FALSE(r.asserts[2].pass);
  CHECK(r.asserts[3].pass);
  CHECK_FALSE(r.all_pass());
}

TEST_CASE("walk experiments") {
  ExperimentConfig c;
  c.algorithm = Algorithm::walk_classical;
  c.walk.n = 50;
  c.walk.p = 1.0;
  c.trials = 5;
  const Report r = run_experiment_serial(c);
  CHECK(r.aggregates.at("success_rate").get<double>() == 1.0);
  CHECK(r.aggregates.at("nonpositive_rate").get<double>() == 0.0);
}

TEST_CASE("C sweep reports the smallest passing value") {
  ExperimentConfig c = small_goc(20);
  c.asserts = {{"error_rate", "==", 0.0, 0.0}};
  const SweepResult s = sweep_C(c, {0.5, 2.0});
  REQUIRE(s.rows.size() == 2);
  CHECK(s.smallest_passing == std::optional<double>{0.5});
}

}
