#include "satsched/validator.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "satsched/linear_model.hpp"

namespace satsched {

std::string_view to_string(FindingCode code) {
  switch (code) {
    case FindingCode::DupMission:
      return "DUP_MISSION";
    case FindingCode::UsageExceeded:
      return "USAGE_EXCEEDED";
    case FindingCode::WindowViolation:
      return "WINDOW_VIOLATION";
    case FindingCode::SetupViolation:
      return "SETUP_VIOLATION";
    case FindingCode::PeriodViolation:
      return "PERIOD_VIOLATION";
    case FindingCode::ReferenceError:
      return "REFERENCE_ERROR";
  }
  return "REFERENCE_ERROR";
}

bool ValidationReport::has(FindingCode code) const {
  return std::any_of(findings.begin(), findings.end(),
                     [&](const Finding& f) { return f.code == code; });
}

ValidationReport validate(const SchedulingInstance& instance, const Schedule& schedule) {
  ValidationReport report;
  const auto& missions = instance.missions();
  const auto& resources = instance.resources();
  const auto& period = instance.period();

  std::set<std::size_t> seen;
  std::vector<std::vector<std::size_t>> per_resource(instance.resource_count());
  for (std::size_t k = 0; k < schedule.assignments.size(); ++k) {
    const auto& a = schedule.assignments[k];
    if (a.mission >= instance.mission_count() || a.resource >= instance.resource_count()) {
      report.findings.push_back({FindingCode::ReferenceError,
                                 a.mission < instance.mission_count() ? missions[a.mission].id : "",
                                 a.resource < instance.resource_count() ? resources[a.resource].id : "",
                                 "assignment " + std::to_string(k) + " names an unknown mission or resource"});
      continue;
    }
    const auto& m = missions[a.mission];
    const auto& r = resources[a.resource];
    if (!seen.insert(a.mission).second) {
      report.findings.push_back({FindingCode::DupMission, m.id, r.id, "mission scheduled more than once"});
    }
    const Seconds end = a.start + m.duration;
    if (a.start < period.begin - kValidationTol || end > period.end + kValidationTol) {
      report.findings.push_back({FindingCode::PeriodViolation, m.id, r.id,
                                 "observation [" + format_number(a.start) + ", " + format_number(end) +
                                     "] leaves the scheduling period"});
    }
    bool inside = false;
    for (const auto& w : instance.windows()) {
      if (w.mission != a.mission || w.resource != a.resource) continue;
      const Seconds lo = std::max(w.begin, m.earliest);
      const Seconds hi = std::min(w.end, m.latest);
      if (a.start >= lo - kValidationTol && end <= hi + kValidationTol) {
        inside = true;
        break;
      }
    }
    if (!inside) {
      report.findings.push_back({FindingCode::WindowViolation, m.id, r.id,
                                 "observation starting at " + format_number(a.start) +
                                     " fits no visible window"});
    }
    per_resource[a.resource].push_back(k);
  }

  for (std::size_t j = 0; j < instance.resource_count(); ++j) {
    auto& ks = per_resource[j];
    const auto& r = resources[j];
    Seconds usage = 0.0;
    for (auto k : ks) usage += missions[schedule.assignments[k].mission].duration;
    if (usage > r.max_usage + kValidationTol) {
      report.findings.push_back({FindingCode::UsageExceeded, "", r.id,
                                 "usage " + format_number(usage) + " exceeds " + format_number(r.max_usage)});
    }
    std::stable_sort(ks.begin(), ks.end(), [&](std::size_t a, std::size_t b) {
      return schedule.assignments[a].start < schedule.assignments[b].start;
    });
    const Seconds setup = setup_time_bound(r);
    for (std::size_t p = 1; p < ks.size(); ++p) {
      const auto& prev = schedule.assignments[ks[p - 1]];
      const auto& next = schedule.assignments[ks[p]];
      const Seconds ready = prev.start + missions[prev.mission].duration + setup;
      if (next.start < ready - kValidationTol) {
        report.findings.push_back({FindingCode::SetupViolation, missions[next.mission].id, r.id,
                                   "starts " + format_number(ready - next.start) + " s too early after '" +
                                       missions[prev.mission].id + "'"});
      }
    }
  }
  return report;
}

}  // namespace satsched
