// Config, instance and report (de)serialisation.

#include <cstdio>
#include <fstream>
#include <sstream>

#include "coinstream/errors.hpp"
#include "coinstream/harness.hpp"

namespace coinstream {

using nlohmann::json;

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "game_of_coins") return Algorithm::game_of_coins;
  if (s == "log_n") return Algorithm::log_n;
  if (s == "log_log_n") return Algorithm::log_log_n;
  if (s == "log_star") return Algorithm::log_star;
  if (s == "top_k") return Algorithm::top_k;
  if (s == "partition") return Algorithm::partition;
  if (s == "eps_best") return Algorithm::eps_best;
  if (s == "walk_classical") return Algorithm::walk_classical;
  if (s == "walk_flex") return Algorithm::walk_flex;
  throw InvalidConfig("unknown algorithm '" + s + "'");
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::game_of_coins: return "game_of_coins";
    case Algorithm::log_n: return "log_n";
    case Algorithm::log_log_n: return "log_log_n";
    case Algorithm::log_star: return "log_star";
    case Algorithm::top_k: return "top_k";
    case Algorithm::partition: return "partition";
    case Algorithm::eps_best: return "eps_best";
    case Algorithm::walk_classical: return "walk_classical";
    case Algorithm::walk_flex: return "walk_flex";
  }
  return "?";
}

Profile profile_from_string(const std::string& s) {
  if (s == "two_point") return Profile::two_point;
  if (s == "descending_chain") return Profile::descending_chain;
  if (s == "uniform_random_respecting_gap") return Profile::uniform_random_respecting_gap;
  throw InvalidConfig("unknown bias profile '" + s + "'");
}

std::string to_string(Profile p) {
  switch (p) {
    case Profile::two_point: return "two_point";
    case Profile::descending_chain: return "descending_chain";
    case Profile::uniform_random_respecting_gap: return "uniform_random_respecting_gap";
  }
  return "?";
}

OrderPolicy order_from_string(const std::string& s) {
  if (s == "best_first") return OrderPolicy::best_first;
  if (s == "best_last") return OrderPolicy::best_last;
  if (s == "random") return OrderPolicy::random;
  if (s == "worst_to_best") return OrderPolicy::worst_to_best;
  throw InvalidConfig("unknown order policy '" + s + "'");
}

std::string to_string(OrderPolicy o) {
  switch (o) {
    case OrderPolicy::best_first: return "best_first";
    case OrderPolicy::best_last: return "best_last";
    case OrderPolicy::random: return "random";
    case OrderPolicy::worst_to_best: return "worst_to_best";
  }
  return "?";
}

namespace {

RewardLaw law_from_string(const std::string& s) {
  if (s == "bernoulli") return RewardLaw::bernoulli;
  if (s == "uniform") return RewardLaw::uniform;
  throw InvalidConfig("unknown reward law '" + s + "'");
}

std::string to_string(RewardLaw l) { return l == RewardLaw::uniform ? "uniform" : "bernoulli"; }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidConfig("malformed JSON in '" + path + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    c.name = j.value("name", c.name);
    c.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    if (j.contains("instance")) {
      const json& i = j.at("instance");
      InstanceSpec& s = c.instance;
      s.n = i.value("n", s.n);
      if (i.contains("profile")) s.profile = profile_from_string(i.at("profile"));
      s.top = i.value("top", s.top);
      s.gap = i.value("gap", s.gap);
      s.k = i.value("k", s.k);
      if (i.contains("order")) s.order = order_from_string(i.at("order"));
      if (i.contains("chain_step") && !i.at("chain_step").is_null()) {
        s.chain_step = i.at("chain_step").get<double>();
      }
      if (i.contains("arm_law")) s.arm_law = law_from_string(i.at("arm_law"));
      s.arm_width = i.value("arm_width", s.arm_width);
      if (i.contains("file") && !i.at("file").is_null()) {
        s.file = i.at("file").get<std::string>();
      }
    }
    if (j.contains("walk")) {
      c.walk.n = j.at("walk").value("n", c.walk.n);
      c.walk.p = j.at("walk").value("p", c.walk.p);
    }
    c.delta = j.value("delta", c.delta);
    c.C = j.value("C", c.C);
    c.trials = j.value("trials", c.trials);
    c.base_seed = j.value("base_seed", c.base_seed);
    if (j.contains("trial_cap")) {
      const json& cap = j.at("trial_cap");
      if (cap.is_string() && cap.get<std::string>() == "auto") {
        c.trial_cap_auto = true;
      } else if (cap.is_null() || (cap.is_boolean() && !cap.get<bool>())) {
        c.trial_cap_auto = false;
        c.trial_cap.reset();
      } else {
        c.trial_cap_auto = false;
        c.trial_cap = cap.get<std::size_t>();
      }
    }
    c.enforce_memory = j.value("enforce_memory", c.enforce_memory);
    c.output = j.value("output", c.output);
    if (j.contains("asserts")) {
      for (const json& a : j.at("asserts")) {
        AssertSpec s;
        s.metric = a.at("metric").get<std::string>();
        s.op = a.at("op").get<std::string>();
        if (a.contains("value") && a.at("value").is_number()) {
          s.value = a.at("value").get<double>();
        } else if (a.contains("value") && a.at("value") != "auto") {
          throw InvalidConfig("assert value must be a number or \"auto\"");
        }
        s.tolerance = a.value("tolerance", 0.0);
        if (s.op != "<=" && s.op != ">=" && s.op != "==" && s.op != "within") {
          throw InvalidConfig("unknown assert operator '" + s.op + "'");
        }
        c.asserts.push_back(s);
      }
    }
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("bad config field: ") + e.what());
  }
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["algorithm"] = to_string(c.algorithm);
  const InstanceSpec& s = c.instance;
  j["instance"] = {{"n", s.n},         {"profile", to_string(s.profile)},
                   {"top", s.top},     {"gap", s.gap},
                   {"k", s.k},         {"order", to_string(s.order)},
                   {"arm_law", to_string(s.arm_law)},
                   {"arm_width", s.arm_width}};
  j["instance"]["chain_step"] = s.chain_step ? json(*s.chain_step) : json(nullptr);
  j["instance"]["file"] = s.file ? json(*s.file) : json(nullptr);
  j["walk"] = {{"n", c.walk.n}, {"p", c.walk.p}};
  j["delta"] = c.delta;
  j["C"] = c.C;
  j["trials"] = c.trials;
  j["base_seed"] = c.base_seed;
  if (c.trial_cap_auto) {
    j["trial_cap"] = "auto";
  } else if (c.trial_cap) {
    j["trial_cap"] = *c.trial_cap;
  } else {
    j["trial_cap"] = nullptr;
  }
  j["enforce_memory"] = c.enforce_memory;
  j["output"] = c.output;
  j["asserts"] = json::array();
  for (const AssertSpec& a : c.asserts) {
    json ja = {{"metric", a.metric}, {"op", a.op}};
    ja["value"] = a.value ? json(*a.value) : json("auto");
    if (a.op == "within") ja["tolerance"] = a.tolerance;
    j["asserts"].push_back(ja);
  }
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  return config_from_json(read_json_file(path));
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw InvalidConfig("override must look like key=value: '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  json* node = &doc;
  std::stringstream ks(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ks, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
  (*node)[parts.back()] = value;
}

json instance_to_json(const CoinInstance& inst) {
  json j;
  j["kind"] = to_string(inst.kind);
  const char* field = inst.kind == InstanceKind::bernoulli_coin ? "biases"
                      : inst.kind == InstanceKind::bounded_arm  ? "means"
                                                                : "ranks";
  j[field] = inst.values;
  j["order"] = inst.arrival_order;
  j["gap"] = inst.gap ? json(*inst.gap) : json(nullptr);
  if (inst.gap_rank != 1) j["gap_rank"] = inst.gap_rank;
  if (inst.kind == InstanceKind::noisy_order) j["gamma"] = inst.gamma;
  if (!inst.arms.empty()) {
    j["arms"] = json::array();
    for (const ArmLaw& a : inst.arms) {
      j["arms"].push_back({{"law", to_string(a.law)}, {"width", a.width}});
    }
  }
  return j;
}

CoinInstance instance_from_json(const json& j) {
  CoinInstance inst;
  try {
    inst.kind = instance_kind_from_string(j.at("kind").get<std::string>());
    const char* field = inst.kind == InstanceKind::bernoulli_coin ? "biases"
                        : inst.kind == InstanceKind::bounded_arm  ? "means"
                                                                  : "ranks";
    inst.values = j.at(field).get<std::vector<double>>();
    if (j.contains("order") && !j.at("order").is_null()) {
      inst.arrival_order = j.at("order").get<std::vector<std::size_t>>();
    } else {
      inst.arrival_order = identity_order(inst.values.size());
    }
    if (j.contains("gap") && !j.at("gap").is_null()) inst.gap = j.at("gap").get<double>();
    inst.gap_rank = j.value("gap_rank", std::size_t{1});
    inst.gamma = j.value("gamma", 0.0);
    if (j.contains("arms")) {
      for (const json& a : j.at("arms")) {
        inst.arms.push_back({law_from_string(a.at("law")), a.value("width", 0.0)});
      }
    }
  } catch (const json::exception& e) {
    throw InvalidInstance(std::string("bad instance field: ") + e.what());
  }
  inst.validate();
  return inst;
}

CoinInstance load_instance_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInstance("cannot open '" + path + "'");
  try {
    return instance_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw InvalidInstance("malformed JSON in '" + path + "': " + e.what());
  }
}

void save_instance_json(const CoinInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << instance_to_json(inst).dump(2) << '\n';
}

std::string config_hash(const ExperimentConfig& c) {
  const std::string text = config_to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_rows_csv(std::ostream& out, const std::vector<TrialRow>& rows,
                    const std::string& hash) {
  out << "seed,chosen,success,tosses,peak_held,king_changes,trials,capped,"
         "arrival_defeat,dethroned,pool_has_topk,mean_prune,walk_min,error,"
         "config_hash,version\n";
  const auto old_precision = out.precision(17);
  for (const TrialRow& r : rows) {
    out << r.seed << ',';
    for (std::size_t i = 0; i < r.chosen.size(); ++i) {
      if (i) out << ';';
      out << r.chosen[i];
    }
    out << ',' << (r.success ? 1 : 0) << ',' << r.tosses << ',' << r.peak_held << ','
        << r.king_changes << ',' << r.trials << ',' << (r.capped ? 1 : 0) << ','
        << r.arrival_defeat << ',' << r.dethroned << ',' << r.pool_has_topk << ','
        << r.mean_prune << ',' << r.walk_min << ',' << sanitize(r.error) << ',' << hash
        << ',' << kToolkitVersion << '\n';
  }
  out.precision(old_precision);
}

std::vector<TrialRow> read_rows_csv(std::istream& in) {
  std::vector<TrialRow> rows;
  std::string line;
  if (!std::getline(in, line)) return rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() < 14) throw Error("short CSV row: " + line);
    TrialRow r;
    r.seed = std::stoull(f[0]);
    if (!f[1].empty()) {
      for (const std::string& idx : split(f[1], ';')) r.chosen.push_back(std::stoull(idx));
    }
    r.success = f[2] == "1";
    r.tosses = std::stoull(f[3]);
    r.peak_held = std::stoull(f[4]);
    r.king_changes = std::stoull(f[5]);
    r.trials = std::stoull(f[6]);
    r.capped = f[7] == "1";
    r.arrival_defeat = std::stoi(f[8]);
    r.dethroned = std::stoi(f[9]);
    r.pool_has_topk = std::stoi(f[10]);
    r.mean_prune = std::stod(f[11]);
    r.walk_min = std::stod(f[12]);
    r.error = f[13];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_report(const Report& r, const std::string& prefix) {
  {
    std::ofstream csv(prefix + ".csv");
    if (!csv) throw Error("cannot write '" + prefix + ".csv'");
    write_rows_csv(csv, r.rows, r.config_hash);
  }
  json j;
  j["config"] = config_to_json(r.config);
  j["config_hash"] = r.config_hash;
  j["version"] = kToolkitVersion;
  j["aggregates"] = r.aggregates;
  j["asserts"] = json::array();
  for (const AssertResult& a : r.asserts) {
    j["asserts"].push_back({{"metric", a.spec.metric},
                            {"op", a.spec.op},
                            {"threshold", a.threshold},
                            {"tolerance", a.spec.tolerance},
                            {"observed", a.observed},
                            {"pass", a.pass}});
  }
  j["all_pass"] = r.all_pass();
  std::ofstream out(prefix + ".json");
  if (!out) throw Error("cannot write '" + prefix + ".json'");
  out << j.dump(2) << '\n';
}

}  // namespace coinstream
