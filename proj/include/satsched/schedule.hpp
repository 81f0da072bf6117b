#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "satsched/instance.hpp"

namespace satsched {

/// Marks an id that a schedule file names but the instance lacks.
inline constexpr std::size_t kUnknownIndex = std::numeric_limits<std::size_t>::max();

struct Assignment {
  std::size_t mission = 0;
  std::size_t resource = 0;
  Seconds window_begin = 0.0;
  Seconds window_end = 0.0;
  Seconds start = 0.0;

  bool operator==(const Assignment&) const = default;
};

struct Schedule {
  std::vector<Assignment> assignments;  // sorted by mission
  long objective_count = 0;
  long objective_weight = 0;

  bool operator==(const Schedule&) const = default;
};

/// Sorts assignments by mission and fills in both objective values.
Schedule make_schedule(const SchedulingInstance& instance, std::vector<Assignment> assignments);

/// Copy with every time moved by `shift` seconds.
Schedule shifted(const Schedule& schedule, Seconds shift);

/// CSV with columns mission,resource,window_begin,window_end,start,duration.
/// Times are written as stored plus `shift`.
std::string write_schedule_csv(const SchedulingInstance& instance, const Schedule& schedule,
                               Seconds shift = 0.0);

/// Parses the CSV written above; times are moved by `-shift`. Ids the
/// instance does not know become kUnknownIndex rather than errors.
Schedule read_schedule_csv(const SchedulingInstance& instance, std::string_view text,
                           Seconds shift = 0.0);

}  // namespace satsched
