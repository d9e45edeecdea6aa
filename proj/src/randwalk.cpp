#include "coinstream/randwalk.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "coinstream/errors.hpp"
#include "coinstream/rng.hpp"

namespace coinstream {

WalkTrace simulate_classical(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidConfig("p must lie in [0,1]");
  WalkTrace tr;
  tr.params.family = WalkFamily::classical;
  tr.params.p = p;
  tr.values.reserve(n + 1);
  tr.values.push_back(0.0);
  CounterRng rng(stream_key(seed, rng_tag::walk, 0));
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += rng.uniform01() < p ? 1.0 : -1.0;
    tr.values.push_back(s);
  }
  return tr;
}

double flex_eta(std::size_t j, double C, double delta) {
  const double jj = static_cast<double>(j);
  return C * std::log(jj / delta) / std::sqrt(jj);
}

double flex_kappa(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidConfig("delta must lie in (0,1)");
  return 1.0 / std::log(1.0 / delta);
}

std::vector<double> flex_centred_steps(std::size_t count, double kappa,
                                       std::uint64_t seed) {
  CounterRng rng(stream_key(seed, rng_tag::walk, 1));
  std::exponential_distribution<double> expo(1.0 / kappa);
  std::vector<double> out(count);
  for (double& x : out) x = kappa - expo(rng);
  return out;
}

WalkTrace simulate_flex(std::size_t n, double kappa, double C, double delta,
                        std::uint64_t seed) {
  if (!(kappa > 0.0)) throw InvalidConfig("kappa must be positive");
  if (!(C > 0.0)) throw InvalidConfig("C must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidConfig("delta must lie in (0,1)");
  WalkTrace tr;
  tr.params = {WalkFamily::flex, 0.0, kappa, C, delta};
  tr.values.reserve(n + 1);
  tr.values.push_back(0.0);
  const std::vector<double> noise = flex_centred_steps(n, kappa, seed);
  double s = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    s += flex_eta(j, C, delta) + noise[j - 1];
    tr.values.push_back(s);
  }
  return tr;
}

WalkTrace budget_trace_as_walk(const RunResult& result, double b,
                               std::optional<std::size_t> king) {
  const auto& events = result.budget_trace;
  std::size_t begin = 0;
  std::size_t end = events.size();
  if (king) {
    begin = events.size();
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (events[i].king == *king) {
        begin = i;
        break;
      }
    }
    end = begin;
    while (end < events.size() && events[end].king == *king) {
      ++end;
      if (!events[end - 1].king_won) break;
    }
  } else if (!result.chosen.empty()) {
    const std::size_t final_king = result.chosen.front();
    begin = end;
    while (begin > 0 && events[begin - 1].king == final_king) --begin;
  }

  WalkTrace tr;
  tr.params.family = WalkFamily::budget;
  tr.values.push_back(0.0);
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const ChallengeEvent& ev = events[i];
    const double paid = ev.budget_before - ev.budget_after + ev.unaffordable;
    s += b - paid;
    tr.values.push_back(s);
  }
  return tr;
}

Positivity check_positive(const WalkTrace& trace) {
  Positivity p;
  p.minimum = trace.values.size() > 1 ? std::numeric_limits<double>::infinity() : 0.0;
  for (std::size_t i = 1; i < trace.values.size(); ++i) {
    const double v = trace.values[i];
    if (v < p.minimum) p.minimum = v;
    if (!(v > 0.0) && p.positive) {
      p.positive = false;
      p.first_violation = i;
    }
  }
  return p;
}

void write_csv(std::ostream& out, const WalkTrace& trace) {
  out << "i,S_i\n";
  out.precision(17);
  for (std::size_t i = 0; i < trace.values.size(); ++i) {
    out << i << ',' << trace.values[i] << '\n';
  }
}

std::string to_string(WalkFamily f) {
  switch (f) {
    case WalkFamily::classical: return "classical";
    case WalkFamily::flex: return "flex";
    case WalkFamily::budget: return "budget";
  }
  return "?";
}

}  // namespace coinstream
