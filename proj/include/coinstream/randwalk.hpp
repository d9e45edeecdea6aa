#pragma once

// One-dimensional random walks: the classical +-1 walk, the flex-length
// positive walk with drifted shifted-exponential steps, and king budget
// traces read as walks.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "coinstream/result.hpp"

namespace coinstream {

enum class WalkFamily { classical, flex, budget };

struct WalkParams {
  WalkFamily family = WalkFamily::classical;
  double p = 0.5;      // classical
  double kappa = 0.0;  // flex
  double C = 0.0;      // flex
  double delta = 0.0;  // flex
};

struct WalkTrace {
  std::vector<double> values;  // S_0 .. S_n, S_0 = 0
  WalkParams params;

  std::size_t steps() const noexcept { return values.empty() ? 0 : values.size() - 1; }
};

WalkTrace simulate_classical(std::size_t n, double p, std::uint64_t seed);

// eta(j) = C ln(j/delta) / sqrt(j).
double flex_eta(std::size_t j, double C, double delta);

// kappa = 1 / ln(1/delta).
double flex_kappa(double delta);

// X_j = eta(j) + kappa - E_j with E_j exponential of mean kappa.
WalkTrace simulate_flex(std::size_t n, double kappa, double C, double delta,
                        std::uint64_t seed);

// Centred flex step X_j - E[X_j] = kappa - E_j, drawn from stream `seed`.
std::vector<double> flex_centred_steps(std::size_t count, double kappa,
                                       std::uint64_t seed);

// Net budget change per challenge, in budget units: b minus what the king paid,
// where a defeat also charges the level it could not afford. With `king`, the
// reign of that coin is used; otherwise the reign of the final king.
WalkTrace budget_trace_as_walk(const RunResult& result, double b,
                               std::optional<std::size_t> king = std::nullopt);

struct Positivity {
  bool positive = true;
  std::optional<std::size_t> first_violation;
  double minimum = 0.0;  // min over i >= 1 (0 for an empty walk)
};

Positivity check_positive(const WalkTrace& trace);

void write_csv(std::ostream& out, const WalkTrace& trace);

std::string to_string(WalkFamily f);

}  // namespace coinstream
