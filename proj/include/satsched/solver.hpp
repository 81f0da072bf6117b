#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "satsched/formulations.hpp"
#include "satsched/instance.hpp"
#include "satsched/schedule.hpp"
#include "satsched/windowing.hpp"

namespace satsched {

/// One observation to place on a resource: inside [begin, end], lasting `duration`.
struct Job {
  Seconds begin = 0.0;
  Seconds end = 0.0;
  Seconds duration = 0.0;
};

/// Start times (aligned with `jobs`) that keep every job in its window and
/// consecutive jobs `setup` apart, or nothing when no order works. Jobs that
/// cannot interact are split into independent groups first.
std::optional<std::vector<Seconds>> sequence_feasible(std::span<const Job> jobs, Seconds setup);

struct SolveLimits {
  double time_limit = std::numeric_limits<double>::infinity();  // seconds
  std::size_t node_limit = std::numeric_limits<std::size_t>::max();
  int threads = 0;  // 0: OpenMP default
};

struct SolveReport {
  Schedule best;
  double root_bound = 0.0;
  double upper_bound = 0.0;  // smallest proven bound
  double gap = 0.0;
  bool proven_optimal = false;
  std::size_t nodes = 0;
  double elapsed = 0.0;  // seconds
};

long objective_value(const Schedule& schedule, ObjectiveKind kind);

/// (bound - best) / bound, 0 when the bound is not positive.
double relative_gap(double bound, double best);

/// Missions sorted by w/D (weight) or by fewest windows (count), each put
/// into the first window that keeps its resource sequenceable.
/// `instance` is the normalized instance `prep` came from.
Schedule greedy(const SchedulingInstance& instance, const PreprocessResult& prep,
                ObjectiveKind objective);

/// Branch and bound over mission -> window choices. Root subtrees are
/// explored in parallel with a shared incumbent.
SolveReport solve_exact(const SchedulingInstance& instance, const PreprocessResult& prep,
                        ObjectiveKind objective, const SolveLimits& limits = {});

/// Single-threaded depth-first reference of solve_exact.
SolveReport solve_exact_serial(const SchedulingInstance& instance, const PreprocessResult& prep,
                               ObjectiveKind objective, const SolveLimits& limits = {});

inline constexpr std::size_t kBruteForceMissions = 10;
inline constexpr std::size_t kBruteForceWindows = 20;

/// Exhaustive oracle over every mission -> window-or-skip mapping with
/// permutation-based sequencing. Throws std::invalid_argument above the
/// size guard.
Schedule brute_force(const SchedulingInstance& instance, ObjectiveKind objective);

}  // namespace satsched
