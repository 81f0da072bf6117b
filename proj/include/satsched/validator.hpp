#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "satsched/instance.hpp"
#include "satsched/schedule.hpp"

namespace satsched {

enum class FindingCode {
  DupMission,
  UsageExceeded,
  WindowViolation,
  SetupViolation,
  PeriodViolation,
  ReferenceError,
};

std::string_view to_string(FindingCode code);

struct Finding {
  FindingCode code;
  std::string mission;   // empty when not applicable
  std::string resource;
  std::string detail;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const { return findings.empty(); }
  bool has(FindingCode code) const;
};

inline constexpr Seconds kValidationTol = 1e-6;

/// Checks a schedule against the instance as given, without relying on any
/// preprocessing: windows are clipped to [E_i, L_i] on the fly and the period
/// is checked on its own. Schedule times must be in the instance's frame.
ValidationReport validate(const SchedulingInstance& instance, const Schedule& schedule);

}  // namespace satsched
