#include "coinstream/schedules.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "coinstream/errors.hpp"

namespace coinstream {

namespace {

constexpr double kMaxCount = 4.0e18;  // keeps every count well inside uint64

// Ceiling that ignores floating noise in the last few ulps, so a formula that
// is mathematically an integer (48 = 16 * ln(e) * 3) is not bumped to 49.
std::uint64_t ceil_count(double x, unsigned level) {
  if (!std::isfinite(x) || x > kMaxCount) {
    throw LevelOverflow("sample count at level " + std::to_string(level) +
                        " is not representable");
  }
  if (x <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::ceil(x * (1.0 - 1e-12)));
}

double coeff(const ChallengeSchedule& s) { return 4.0 / (s.gap * s.gap); }

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::main: return "main";
    case Family::topk: return "topk";
    case Family::logn: return "logn";
    case Family::loglogn: return "loglogn";
    case Family::logstar: return "logstar";
    case Family::epsbest: return "epsbest";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  if (s == "main") return Family::main;
  if (s == "topk") return Family::topk;
  if (s == "logn") return Family::logn;
  if (s == "loglogn") return Family::loglogn;
  if (s == "logstar") return Family::logstar;
  if (s == "epsbest") return Family::epsbest;
  throw InvalidSchedule("unknown schedule family '" + s + "'");
}

void ChallengeSchedule::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidSchedule("delta must lie in (0,1)");
  if (family == Family::topk && !(delta < 0.5)) {
    throw InvalidSchedule("top-k schedule requires delta < 1/2");
  }
  if (!(gap > 0.0 && gap <= 1.0)) throw InvalidSchedule("gap must lie in (0,1]");
  if (!(C > 0.0) || !std::isfinite(C)) throw InvalidSchedule("C must be positive");
  if (family == Family::topk && k < 1) throw InvalidSchedule("k must be >= 1");
}

ChallengeSchedule ChallengeSchedule::make(Family f, double gap, double delta,
                                          double C, std::size_t k) {
  ChallengeSchedule s;
  s.family = f;
  s.gap = gap;
  s.delta = delta;
  s.C = C;
  s.k = k;
  s.validate();
  return s;
}

std::uint64_t r_level(const ChallengeSchedule& s, unsigned level) {
  if (level == 0) throw InvalidSchedule("levels start at 1");
  switch (s.family) {
    case Family::logstar:
    case Family::epsbest: {
      std::uint64_t r = 4;
      for (unsigned l = 1; l < level; ++l) {
        if (r >= 63) {
          throw LevelOverflow("r_" + std::to_string(level) + " exceeds 2^63");
        }
        r = std::uint64_t{1} << r;
      }
      return r;
    }
    default: {
      if (level > 39) throw LevelOverflow("3^" + std::to_string(level) + " exceeds 2^63");
      std::uint64_t r = 1;
      for (unsigned l = 0; l < level; ++l) r *= 3;
      return r;
    }
  }
}

std::uint64_t s_level(const ChallengeSchedule& s, unsigned level) {
  const double r = static_cast<double>(r_level(s, level));
  const double ln_inv_delta = std::log(1.0 / s.delta);
  double x = 0.0;
  switch (s.family) {
    case Family::main:
      x = coeff(s) * ln_inv_delta * r;
      break;
    case Family::topk:
      x = 16.0 * coeff(s) * std::log(static_cast<double>(s.k) / s.delta) * r;
      break;
    case Family::logn:
      x = coeff(s) * (ln_inv_delta + r);
      break;
    case Family::loglogn:
      x = coeff(s) * (std::log(2.0 / s.delta) + r);
      break;
    case Family::logstar:
      x = coeff(s) * (ln_inv_delta + 3.0 * r);
      break;
    case Family::epsbest: {
      const double e = eps_level(s, level);
      x = 4.0 / (e * e) * (ln_inv_delta + 3.0 * r);
      break;
    }
  }
  return ceil_count(x, level);
}

double budget_increment(const ChallengeSchedule& s) {
  const double s1 = static_cast<double>(s_level(s, 1));
  switch (s.family) {
    case Family::main:
      return coeff(s) * s.C * std::log(1.0 / s.delta) + s1;
    case Family::topk:
      return 16.0 * coeff(s) * s.C * std::log(static_cast<double>(s.k) / s.delta) + s1;
    default:
      throw InvalidSchedule("budget increment is defined for main and topk only");
  }
}

std::uint64_t s_top(const ChallengeSchedule& s, std::size_t n) {
  const double ln_n = n > 0 ? std::log(static_cast<double>(n)) : 0.0;
  return ceil_count(coeff(s) * (std::log(1.0 / s.delta) + ln_n), 0);
}

std::uint64_t c_level(const ChallengeSchedule& s, unsigned level) {
  if (level == 0) throw InvalidSchedule("levels start at 1");
  std::uint64_t r = 0;
  try {
    r = r_level(s, level);
  } catch (const LevelOverflow&) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  // 2^{r - (level - 1)}
  const std::uint64_t shift = r - (level - 1);
  if (shift >= 64) return std::numeric_limits<std::uint64_t>::max();
  return std::uint64_t{1} << shift;
}

double eps_level(const ChallengeSchedule& s, unsigned level) {
  if (level == 0) throw InvalidSchedule("levels start at 1");
  return s.gap / (10.0 * std::ldexp(1.0, static_cast<int>(level) - 1));
}

unsigned log_star(std::uint64_t n) {
  unsigned count = 0;
  while (n > 1) {
    n = static_cast<std::uint64_t>(std::bit_width(n) - 1);
    ++count;
  }
  return count;
}

unsigned ceil_log4(double x) {
  unsigned t = 0;
  double p = 1.0;
  while (p < x * (1.0 - 1e-12)) {
    p *= 4.0;
    ++t;
  }
  return t;
}

unsigned level_count(const ChallengeSchedule& s, std::size_t n) {
  if (n == 0) throw EmptyStream();
  switch (s.family) {
    case Family::logn:
      return ceil_log4(static_cast<double>(n));
    case Family::loglogn:
      return ceil_log4(std::log(static_cast<double>(n)));
    case Family::logstar:
    case Family::epsbest:
      return log_star(n) + 1;
    default:
      throw InvalidSchedule("level_count is undefined for family " + to_string(s.family));
  }
}

double sample_mean(StreamSession& session, CoinHandle h, std::uint64_t m) {
  if (m == 0) {
    if (!session.alive(h)) throw SampleAfterRelease("sample on a released coin");
    return 0.0;
  }
  return session.pull_sum(h, m) / static_cast<double>(m);
}

DuelOutcome duel(StreamSession& session, CoinHandle first, CoinHandle second,
                 std::uint64_t m) {
  DuelOutcome out;
  if (session.instance().kind == InstanceKind::noisy_order) {
    const std::uint64_t wins = session.compare_noisy_many(first, second, m);
    const double denom = m > 0 ? static_cast<double>(m) : 1.0;
    out.empirical_first = static_cast<double>(wins) / denom;
    out.empirical_second = static_cast<double>(m - wins) / denom;
    out.tosses_used = m;
  } else {
    out.empirical_first = sample_mean(session, first, m);
    out.empirical_second = sample_mean(session, second, m);
    out.tosses_used = 2 * m;
  }
  out.tie = out.empirical_first == out.empirical_second;
  out.winner = out.empirical_first > out.empirical_second ? DuelOutcome::Side::first
                                                          : DuelOutcome::Side::second;
  return out;
}

}  // namespace coinstream
