#pragma once

// Multi-level selection algorithms that are told n up front.
//
// run_log_n      buckets of 4 per level, argmax promoted upward.
// run_log_log_n  the same for t = ceil(log4 ln n) levels, then a running
//                candidate duels every top-level champion with s_T tosses.
// run_log_star   one champion and one counter per level; a champion is
//                promoted after c_l coins have been processed at its level.

#include <cstddef>

#include "coinstream/result.hpp"
#include "coinstream/schedules.hpp"

namespace coinstream {

RunResult run_log_n(StreamSession& session, const ChallengeSchedule& schedule,
                    std::size_t n);

RunResult run_log_log_n(StreamSession& session, const ChallengeSchedule& schedule,
                        std::size_t n);

RunResult run_log_star(StreamSession& session, const ChallengeSchedule& schedule,
                       std::size_t n);

// Champion ladder shared by run_log_star and the eps-best adapter. The
// schedule must be of family logstar or epsbest. Stream end is handled by
// flushing every level's champion upward instead of padding: padding to the
// next counter boundary would need on the order of c_t dummy coins.
RunResult run_champion_ladder(StreamSession& session, const ChallengeSchedule& schedule,
                              std::size_t n);

// Stored-coin bounds stated for each algorithm: 4t, 4t+1 and t.
std::size_t stated_memory(const ChallengeSchedule& schedule, std::size_t n);

}  // namespace coinstream
