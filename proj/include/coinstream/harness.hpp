#pragma once

// Experiment orchestration: instance generation, seeded Monte Carlo runs,
// scoring, aggregation, assertion checks and persistence.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coinstream/oracle.hpp"
#include "coinstream/result.hpp"
#include "coinstream/schedules.hpp"

namespace coinstream {

inline constexpr const char* kToolkitVersion = "0.1.0";

enum class Algorithm {
  game_of_coins,
  log_n,
  log_log_n,
  log_star,
  top_k,
  partition,
  eps_best,
  walk_classical,
  walk_flex
};

enum class Profile { two_point, descending_chain, uniform_random_respecting_gap };

enum class OrderPolicy { best_first, best_last, random, worst_to_best };

struct InstanceSpec {
  std::size_t n = 100;
  Profile profile = Profile::two_point;
  double top = 0.9;  // bias of the best coin(s)
  double gap = 0.1;  // Delta, Delta_k, gamma or eps
  std::size_t k = 1;
  OrderPolicy order = OrderPolicy::random;
  std::optional<double> chain_step;  // descending_chain; default eps / (4n)
  RewardLaw arm_law = RewardLaw::bernoulli;
  double arm_width = 0.0;
  std::optional<std::string> file;  // load a fixed instance instead
};

struct WalkSpec {
  std::size_t n = 1000;
  double p = 0.5;
};

struct AssertSpec {
  std::string metric;
  std::string op;                 // "<=", ">=", "==", "within"
  std::optional<double> value;    // empty means "auto"
  double tolerance = 0.0;         // for "within"
};

struct ExperimentConfig {
  std::string name = "experiment";
  Algorithm algorithm = Algorithm::game_of_coins;
  InstanceSpec instance;
  WalkSpec walk;
  double delta = 0.1;
  double C = kDefaultC;
  std::size_t trials = 100;
  std::uint64_t base_seed = 1;
  // Empty: no cap. Default: twice the expected-trial bound.
  std::optional<std::size_t> trial_cap;
  bool trial_cap_auto = true;
  bool enforce_memory = true;
  std::string output;
  std::vector<AssertSpec> asserts;

  void validate() const;
};

struct TrialRow {
  std::uint64_t seed = 0;
  std::vector<std::size_t> chosen;
  bool success = false;
  std::uint64_t tosses = 0;
  std::size_t peak_held = 0;
  std::size_t king_changes = 0;
  std::size_t trials = 0;
  bool capped = false;
  int arrival_defeat = -1;  // best coin lost its arrival challenge (-1: n/a)
  int dethroned = -1;       // best coin was later dethroned (-1: never king)
  int pool_has_topk = -1;   // top-k all present at the final selection
  double mean_prune = -1.0;
  double walk_min = 0.0;
  std::string error;

  bool operator==(const TrialRow&) const = default;
};

struct AssertResult {
  AssertSpec spec;
  double threshold = 0.0;
  double observed = 0.0;
  bool pass = false;
};

struct Report {
  ExperimentConfig config;
  std::string config_hash;
  std::vector<TrialRow> rows;
  nlohmann::json aggregates;
  std::vector<AssertResult> asserts;

  bool all_pass() const;
};

// Parsing and serialisation.
Algorithm algorithm_from_string(const std::string& s);
std::string to_string(Algorithm a);
Profile profile_from_string(const std::string& s);
std::string to_string(Profile p);
OrderPolicy order_from_string(const std::string& s);
std::string to_string(OrderPolicy o);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);
// Applies "a.b=value" to a config document; value is parsed as JSON when
// possible, otherwise taken as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

CoinInstance load_instance_json(const std::string& path);
void save_instance_json(const CoinInstance& inst, const std::string& path);
nlohmann::json instance_to_json(const CoinInstance& inst);
CoinInstance instance_from_json(const nlohmann::json& j);

std::string config_hash(const ExperimentConfig& c);

// Instances and schedules.
InstanceKind instance_kind_for(Algorithm a);
CoinInstance generate_instance(const InstanceSpec& spec, InstanceKind kind,
                               std::uint64_t seed);
ChallengeSchedule schedule_for(const ExperimentConfig& c);
// Budget increment of the schedule used, or 0 when not applicable.
double budget_for(const ExperimentConfig& c);
std::optional<std::size_t> memory_bound(const ExperimentConfig& c);
std::optional<std::size_t> effective_trial_cap(const ExperimentConfig& c);

// Success scoring against the hidden instance.
bool score_argmax(const CoinInstance& inst, const std::vector<std::size_t>& chosen);
bool score_top_k(const CoinInstance& inst, const std::vector<std::size_t>& chosen,
                 std::size_t k);
bool score_eps_best(const CoinInstance& inst, const std::vector<std::size_t>& chosen,
                    double eps);

// One seeded trial.
TrialRow run_single_trial(const ExperimentConfig& c, std::size_t trial_index);

// Trial-parallel runner (OpenMP when available) and its serial reference.
Report run_experiment(const ExperimentConfig& c);
Report run_experiment_serial(const ExperimentConfig& c);

// Wilson score interval half-width for proportion p over n trials.
double wilson_half_width(double p, std::size_t n, double z = 1.0);
// Monte Carlo slack: 3 Wilson half-widths at reference proportion p.
double mc_slack(double p, std::size_t n);

nlohmann::json aggregate(const ExperimentConfig& c, const std::vector<TrialRow>& rows);
std::vector<AssertResult> evaluate_asserts(const ExperimentConfig& c,
                                           const nlohmann::json& aggregates);
// The value used when an assertion says "auto".
double auto_threshold(const ExperimentConfig& c, const AssertSpec& a,
                      const nlohmann::json& aggregates);

// Columns: seed,chosen,success,tosses,peak_held,king_changes,trials,capped,
// arrival_defeat,dethroned,pool_has_topk,mean_prune,walk_min,error,
// config_hash,version. `chosen` joins indices with ';'.
void write_rows_csv(std::ostream& out, const std::vector<TrialRow>& rows,
                    const std::string& hash = "");
std::vector<TrialRow> read_rows_csv(std::istream& in);
// Writes <prefix>.csv and <prefix>.json.
void write_report(const Report& r, const std::string& prefix);

struct SweepRow {
  double C = 0.0;
  double success_rate = 0.0;
  std::uint64_t max_tosses = 0;
  bool pass = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<double> smallest_passing;
};

SweepResult sweep_C(const ExperimentConfig& c, const std::vector<double>& grid);

// Thread count from COINSTREAM_THREADS, if set.
std::optional<int> env_thread_count();

}  // namespace coinstream
