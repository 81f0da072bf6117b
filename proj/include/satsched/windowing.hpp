#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "satsched/instance.hpp"

namespace satsched {

/// True when [b1,e1] and [b2,e2] share more than a single point.
inline bool overlaps(Seconds b1, Seconds e1, Seconds b2, Seconds e2) {
  return (e1 < e2 ? e1 : e2) - (b1 > b2 ? b1 : b2) > kTimeEps;
}

/// Maximal union of chain-overlapping windows on one resource.
struct FeasibleInterval {
  std::size_t resource = 0;
  Seconds begin = 0.0;
  Seconds end = 0.0;
  std::vector<std::size_t> members;  // window indices, sorted by (begin, index)

  Seconds length() const { return end - begin; }
};

struct ConflictSegment {
  Seconds begin = 0.0;
  Seconds end = 0.0;
  int degree = 0;

  bool operator==(const ConflictSegment&) const = default;
};

struct EffectiveSubinterval {
  std::size_t resource = 0;
  Seconds begin = 0.0;
  Seconds end = 0.0;
  std::vector<std::size_t> candidates;  // windows fully inside [begin, end]
  int capacity = 0;                     // srn: missions that fit at most

  Seconds length() const { return end - begin; }
  /// Number of distinct missions among the candidate windows.
  std::size_t candidate_missions(const SchedulingInstance& instance) const;
};

/// A mission fixed during preprocessing. `window` indexes the instance the
/// preprocessing ran on.
struct PreassignedObservation {
  std::size_t mission = 0;
  std::size_t resource = 0;
  std::size_t window = 0;
  Seconds start = 0.0;

  bool operator==(const PreassignedObservation&) const = default;
};

struct PreprocessResult {
  std::vector<PreassignedObservation> preassigned;
  SchedulingInstance reduced;
  std::vector<EffectiveSubinterval> subintervals;  // windows index `reduced`

  std::size_t n_prime() const { return preassigned.size(); }

  /// No pre-assignments and no subinterval inequalities.
  static PreprocessResult identity(const SchedulingInstance& instance);
};

struct PreprocessOptions {
  bool preassign = true;
  bool interval_assignment = true;  // whole feasible intervals, needs preassign
  bool subintervals = true;
};

struct ResourceStats {
  std::size_t resource = 0;
  std::size_t window_count = 0;  // N
  Seconds total_visible = 0.0;   // T
  Seconds feasible_time = 0.0;   // F
  long capacity = 0;             // rn
  std::optional<double> contention;  // conf, absent when F == 0
};

struct InstanceStats {
  std::vector<ResourceStats> per_resource;
  double paon = 0.0;
  Seconds paot = 0.0;
};

/// Feasible time intervals of the given windows, which must share a resource.
/// Windows touching at a single point stay in separate intervals.
std::vector<FeasibleInterval> build_feasible_intervals(
    const SchedulingInstance& instance, std::span<const std::size_t> windows);
std::vector<FeasibleInterval> build_feasible_intervals(
    const SchedulingInstance& instance, std::size_t resource);

/// Degree profile of one feasible interval; adjacent segments differ in degree.
std::vector<ConflictSegment> conflict_profile(const SchedulingInstance& instance,
                                              const FeasibleInterval& interval);

/// srn: how many of the candidate observations fit into `length` seconds with
/// `stabilize` seconds between consecutive ones. Uniform durations use the
/// closed form; mixed durations pack shortest-first.
int max_assignable(Seconds length, std::span<const Seconds> durations,
                   Seconds stabilize);

/// Fixes every mission owning a window part that no other window (padded by
/// the resource setup bound) can reach, then repeats until nothing changes.
/// Subintervals are left empty.
PreprocessResult preassign_free_windows(const SchedulingInstance& instance);

struct SubintervalResult {
  std::vector<PreassignedObservation> preassigned;
  std::vector<EffectiveSubinterval> subintervals;
};

/// Direct assignment of every mission of a feasible interval whose capacity
/// covers all its candidates, or nothing when the greedy placement fails or
/// would interfere with observations outside the interval. `fixed` holds the
/// observations already fixed on the resource as (start, duration) pairs.
std::optional<std::vector<PreassignedObservation>> assign_interval_directly(
    const SchedulingInstance& instance, const FeasibleInterval& interval,
    std::span<const std::pair<Seconds, Seconds>> fixed = {});

/// Subintervals obtained by repeatedly stripping the earliest-starting
/// windows, the latest-ending windows, and the longest window from the
/// interval. Only spans whose candidates exceed their capacity are returned.
std::vector<EffectiveSubinterval> strip_subintervals(const SchedulingInstance& instance,
                                                     const FeasibleInterval& interval);

/// Direct assignment when possible, otherwise the stripped subintervals.
SubintervalResult effective_subintervals(
    const SchedulingInstance& instance, const FeasibleInterval& interval,
    std::span<const std::pair<Seconds, Seconds>> fixed = {});

/// Subintervals for every resource, ordered by (resource, begin, end).
/// Resources are processed in parallel.
std::vector<EffectiveSubinterval> generate_subintervals(const SchedulingInstance& instance);
std::vector<EffectiveSubinterval> generate_subintervals_serial(
    const SchedulingInstance& instance);

/// Full preprocessing: free-window and direct interval assignment to a
/// fixpoint, then effective subintervals of the reduced instance.
PreprocessResult preprocess(const SchedulingInstance& instance,
                            const PreprocessOptions& options = {});

std::optional<double> contention_degree(Seconds total_visible, Seconds feasible_time);

/// paon and paot over `mission_count` missions from per-resource N and T.
InstanceStats summarize_stats(std::size_t mission_count, std::vector<ResourceStats> per_resource);

/// Per-resource N, T, F, rn, conf and per-mission paon/paot. Resources are
/// processed in parallel; the output order is resource order either way.
InstanceStats resource_stats(const SchedulingInstance& instance);
InstanceStats resource_stats_serial(const SchedulingInstance& instance);

}  // namespace satsched
