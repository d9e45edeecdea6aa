// Command-line front end: run, sweep, walk.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coinstream/errors.hpp"
#include "coinstream/harness.hpp"
#include "coinstream/randwalk.hpp"

using namespace coinstream;
using nlohmann::json;

namespace {

ExperimentConfig load_with_overrides(const std::string& path,
                                     const std::vector<std::string>& overrides,
                                     const std::optional<std::uint64_t>& seed) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open '" + path + "'");
  json doc = json::parse(in);
  for (const std::string& o : overrides) apply_override(doc, o);
  if (seed) doc["base_seed"] = *seed;
  return config_from_json(doc);
}

void print_summary(const Report& r) {
  const json& a = r.aggregates;
  std::printf("%s [%s] trials=%zu success_rate=%.4f max_tosses=%llu max_peak_held=%zu\n",
              r.config.name.c_str(), r.config_hash.c_str(), r.rows.size(),
              a.at("success_rate").get<double>(),
              static_cast<unsigned long long>(a.at("max_tosses").get<std::uint64_t>()),
              a.at("max_peak_held").get<std::size_t>());
  for (const AssertResult& ar : r.asserts) {
    std::printf("  %-4s %s %s %.6g (observed %.6g)\n", ar.pass ? "PASS" : "FAIL",
                ar.spec.metric.c_str(), ar.spec.op.c_str(), ar.threshold, ar.observed);
  }
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) grid.push_back(std::stod(item));
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming most-biased-coin toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out_prefix;

  auto* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("--config", config_path, "Config JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--override", overrides, "key=value (dotted keys)");
  run->add_option("--seed", seed, "Override base_seed");
  run->add_option("--out", out_prefix, "Output prefix for .csv/.json (default: config output)");

  std::string param = "C";
  std::string grid_text;
  auto* sweep = app.add_subcommand("sweep", "Sweep a parameter");
  sweep->add_option("--config", config_path, "Config JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--param", param, "Parameter to sweep")->check(CLI::IsMember({"C"}));
  sweep->add_option("--grid", grid_text, "Comma-separated values")->required();
  sweep->add_option("--override", overrides, "key=value (dotted keys)");
  sweep->add_option("--seed", seed, "Override base_seed");

  std::string family = "flex";
  std::size_t walk_n = 1000;
  double walk_delta = 0.1;
  double walk_p = 0.9;
  double walk_C = kDefaultC;
  std::size_t seeds = 1000;
  std::uint64_t walk_seed = 1;
  std::string walk_out;
  auto* walk = app.add_subcommand("walk", "Simulate random walks");
  walk->add_option("--family", family, "flex or classical")
      ->check(CLI::IsMember({"flex", "classical"}));
  walk->add_option("--n", walk_n, "Steps per walk");
  walk->add_option("--delta", walk_delta, "Flex walk delta");
  walk->add_option("--p", walk_p, "Classical forward probability");
  walk->add_option("--C", walk_C, "Flex walk drift constant");
  walk->add_option("--seeds", seeds, "Number of walks");
  walk->add_option("--seed", walk_seed, "First seed");
  walk->add_option("--out", walk_out, "CSV path for the first walk (i,S_i)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const ExperimentConfig c = load_with_overrides(config_path, overrides, seed);
      const Report r = run_experiment(c);
      const std::string prefix = out_prefix.empty() ? c.output : out_prefix;
      if (!prefix.empty()) write_report(r, prefix);
      print_summary(r);
      return r.all_pass() ? 0 : 1;
    }
    if (*sweep) {
      const ExperimentConfig c = load_with_overrides(config_path, overrides, seed);
      const SweepResult s = sweep_C(c, parse_grid(grid_text));
      std::printf("C,success_rate,max_tosses,pass\n");
      for (const SweepRow& row : s.rows) {
        std::printf("%g,%.4f,%llu,%d\n", row.C, row.success_rate,
                    static_cast<unsigned long long>(row.max_tosses), row.pass ? 1 : 0);
      }
      if (s.smallest_passing) {
        std::printf("smallest passing C: %g\n", *s.smallest_passing);
        return 0;
      }
      std::printf("no C in the grid passed\n");
      return 1;
    }
    if (*walk) {
      ExperimentConfig c;
      c.name = "walk_" + family;
      c.algorithm = family == "flex" ? Algorithm::walk_flex : Algorithm::walk_classical;
      c.walk.n = walk_n;
      c.walk.p = walk_p;
      c.delta = walk_delta;
      c.C = walk_C;
      c.trials = seeds;
      c.base_seed = walk_seed;
      const Report r = run_experiment(c);
      std::printf("%s walks=%zu positive_rate=%.4f\n", family.c_str(), seeds,
                  r.aggregates.at("success_rate").get<double>());
      if (!walk_out.empty()) {
        const WalkTrace tr = family == "flex"
                                 ? simulate_flex(walk_n, flex_kappa(walk_delta), walk_C,
                                                 walk_delta, walk_seed)
                                 : simulate_classical(walk_n, walk_p, walk_seed);
        std::ofstream out(walk_out);
        if (!out) throw Error("cannot write '" + walk_out + "'");
        write_csv(out, tr);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
