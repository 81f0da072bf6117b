#include "satsched/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include <omp.h>

namespace satsched {

namespace {

using Slot = std::pair<Seconds, Seconds>;  // (start, duration)

std::vector<Seconds> mission_durations(const SchedulingInstance& instance,
                                       std::span<const std::size_t> windows) {
  std::set<std::size_t> missions;
  for (auto w : windows) missions.insert(instance.windows()[w].mission);
  std::vector<Seconds> out;
  out.reserve(missions.size());
  for (auto m : missions) out.push_back(instance.missions()[m].duration);
  return out;
}

// [start, start + duration] keeps at least `gap` seconds from the window.
bool clear_of_window(Seconds start, Seconds duration, const VisibleWindow& w,
                     Seconds gap) {
  return start + duration + gap <= w.begin + kTimeEps || start >= w.end + gap - kTimeEps;
}

bool clear_of_slot(Seconds start, Seconds duration, const Slot& slot, Seconds gap) {
  return start + duration + gap <= slot.first + kTimeEps ||
         start >= slot.first + slot.second + gap - kTimeEps;
}

// Earliest start inside `w` whose observation stays `gap` away from every
// blocked window and fixed slot.
std::optional<Seconds> earliest_free_start(const SchedulingInstance& instance,
                                           const VisibleWindow& w,
                                           std::span<const std::size_t> blockers,
                                           std::span<const Slot> fixed, Seconds gap) {
  const Seconds duration = instance.missions()[w.mission].duration;
  std::vector<std::pair<Seconds, Seconds>> blocked;  // open intervals
  blocked.reserve(blockers.size() + fixed.size());
  for (auto b : blockers) {
    const auto& other = instance.windows()[b];
    blocked.emplace_back(other.begin - gap, other.end + gap);
  }
  for (const auto& slot : fixed) {
    blocked.emplace_back(slot.first - gap, slot.first + slot.second + gap);
  }
  std::sort(blocked.begin(), blocked.end());
  Seconds start = w.begin;
  for (const auto& [lo, hi] : blocked) {
    if (hi <= start + kTimeEps) continue;
    if (lo >= start + duration - kTimeEps) break;
    start = hi;
  }
  if (start + duration <= w.end + kTimeEps) return start;
  return std::nullopt;
}

// Resources whose usage limit cannot bind: everything that could still be
// scheduled there, plus what is already fixed, fits into max_usage.
std::vector<bool> usage_slack(const SchedulingInstance& instance,
                              const std::vector<bool>& alive,
                              const std::vector<Seconds>& used) {
  const auto& windows = instance.windows();
  std::vector<std::set<std::size_t>> candidates(instance.resource_count());
  for (std::size_t w = 0; w < windows.size(); ++w) {
    if (alive[w]) candidates[windows[w].resource].insert(windows[w].mission);
  }
  std::vector<bool> out(instance.resource_count());
  for (std::size_t j = 0; j < out.size(); ++j) {
    Seconds demand = used[j];
    for (auto m : candidates[j]) demand += instance.missions()[m].duration;
    out[j] = demand <= instance.resources()[j].max_usage + kTimeEps;
  }
  return out;
}

std::vector<EffectiveSubinterval> subintervals_of_resource(
    const SchedulingInstance& instance, std::size_t resource) {
  std::vector<EffectiveSubinterval> out;
  for (const auto& fti : build_feasible_intervals(instance, resource)) {
    auto part = strip_subintervals(instance, fti);
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

ResourceStats stats_of_resource(const SchedulingInstance& instance, std::size_t resource) {
  ResourceStats s;
  s.resource = resource;
  for (const auto& w : instance.windows()) {
    if (w.resource != resource) continue;
    ++s.window_count;
    s.total_visible += w.length();
  }
  const Seconds stabilize = instance.resources()[resource].stabilize;
  for (const auto& fti : build_feasible_intervals(instance, resource)) {
    s.feasible_time += fti.length();
    const auto durations = mission_durations(instance, fti.members);
    s.capacity += max_assignable(fti.length(), durations, stabilize);
  }
  s.contention = contention_degree(s.total_visible, s.feasible_time);
  return s;
}

bool same_span(const EffectiveSubinterval& a, const EffectiveSubinterval& b) {
  return a.resource == b.resource && a.begin == b.begin && a.end == b.end;
}

bool span_less(const EffectiveSubinterval& a, const EffectiveSubinterval& b) {
  return std::tie(a.resource, a.begin, a.end) < std::tie(b.resource, b.begin, b.end);
}

}  // namespace

std::size_t EffectiveSubinterval::candidate_missions(const SchedulingInstance& instance) const {
  std::set<std::size_t> missions;
  for (auto w : candidates) missions.insert(instance.windows()[w].mission);
  return missions.size();
}

PreprocessResult PreprocessResult::identity(const SchedulingInstance& instance) {
  return PreprocessResult{{}, instance, {}};
}

std::vector<FeasibleInterval> build_feasible_intervals(const SchedulingInstance& instance,
                                                       std::span<const std::size_t> windows) {
  const auto& all = instance.windows();
  std::vector<std::size_t> order(windows.begin(), windows.end());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(all[a].begin, a) < std::tie(all[b].begin, b);
  });

  std::vector<FeasibleInterval> out;
  for (auto w : order) {
    const auto& win = all[w];
    if (out.empty() || win.begin >= out.back().end - kTimeEps) {
      out.push_back({win.resource, win.begin, win.end, {w}});
    } else {
      out.back().end = std::max(out.back().end, win.end);
      out.back().members.push_back(w);
    }
  }
  return out;
}

std::vector<FeasibleInterval> build_feasible_intervals(const SchedulingInstance& instance,
                                                       std::size_t resource) {
  const auto windows = instance.windows_of_resource(resource);
  return build_feasible_intervals(instance, windows);
}

std::vector<ConflictSegment> conflict_profile(const SchedulingInstance& instance,
                                              const FeasibleInterval& interval) {
  // +1 at every begin, -1 at every end; ends sort before begins at equal times.
  std::vector<std::pair<Seconds, int>> events;
  events.reserve(2 * interval.members.size());
  for (auto w : interval.members) {
    events.emplace_back(instance.windows()[w].begin, +1);
    events.emplace_back(instance.windows()[w].end, -1);
  }
  std::sort(events.begin(), events.end());

  std::vector<ConflictSegment> out;
  int degree = 0;
  for (std::size_t e = 0; e < events.size();) {
    const Seconds at = events[e].first;
    while (e < events.size() && events[e].first == at) degree += events[e++].second;
    if (e == events.size()) break;
    const Seconds next = events[e].first;
    if (degree <= 0 || next - at <= 0.0) continue;
    if (!out.empty() && out.back().degree == degree && out.back().end == at) {
      out.back().end = next;
    } else {
      out.push_back({at, next, degree});
    }
  }
  return out;
}

int max_assignable(Seconds length, std::span<const Seconds> durations, Seconds stabilize) {
  if (durations.empty()) return 0;
  std::vector<Seconds> sorted(durations.begin(), durations.end());
  std::sort(sorted.begin(), sorted.end());
  const int available = static_cast<int>(sorted.size());

  if (sorted.front() == sorted.back()) {
    const double fit = std::floor((length + stabilize) / (sorted.front() + stabilize) + kTimeEps);
    return std::clamp(static_cast<int>(fit), 0, available);
  }

  Seconds used = 0.0;
  int count = 0;
  for (Seconds d : sorted) {
    const Seconds need = count == 0 ? d : used + stabilize + d;
    if (need > length + kTimeEps) break;
    used = need;
    ++count;
  }
  return count;
}

std::optional<std::vector<PreassignedObservation>> assign_interval_directly(
    const SchedulingInstance& instance, const FeasibleInterval& interval,
    std::span<const Slot> fixed) {
  if (interval.members.empty()) return std::vector<PreassignedObservation>{};
  const auto& windows = instance.windows();
  const auto& resource = instance.resources()[interval.resource];
  const Seconds gap = setup_time_bound(resource);

  const auto durations = mission_durations(instance, interval.members);
  const int capacity = max_assignable(interval.length(), durations, resource.stabilize);
  if (static_cast<int>(durations.size()) > capacity) return std::nullopt;

  // Earliest-deadline order over missions, each on its first window that still fits.
  std::map<std::size_t, std::vector<std::size_t>> options;
  for (auto w : interval.members) options[windows[w].mission].push_back(w);
  std::vector<std::size_t> order;
  for (const auto& [mission, ws] : options) order.push_back(mission);
  auto latest_start = [&](std::size_t mission) {
    Seconds best = -std::numeric_limits<Seconds>::infinity();
    for (auto w : options[mission]) {
      best = std::max(best, windows[w].end - instance.missions()[mission].duration);
    }
    return best;
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return latest_start(a) < latest_start(b);
  });

  std::vector<PreassignedObservation> placed;
  Seconds cursor = -std::numeric_limits<Seconds>::infinity();
  for (auto mission : order) {
    const Seconds duration = instance.missions()[mission].duration;
    bool done = false;
    for (auto w : options[mission]) {
      const Seconds start = std::max(cursor, windows[w].begin);
      if (start + duration <= windows[w].end + kTimeEps) {
        placed.push_back({mission, interval.resource, w, start});
        cursor = start + duration + gap;
        done = true;
        break;
      }
    }
    if (!done) return std::nullopt;
  }

  std::set<std::size_t> members(order.begin(), order.end());
  for (std::size_t w = 0; w < windows.size(); ++w) {
    if (windows[w].resource != interval.resource || members.count(windows[w].mission)) {
      continue;
    }
    for (const auto& p : placed) {
      if (!clear_of_window(p.start, instance.missions()[p.mission].duration, windows[w], gap)) {
        return std::nullopt;
      }
    }
  }
  for (const auto& slot : fixed) {
    for (const auto& p : placed) {
      if (!clear_of_slot(p.start, instance.missions()[p.mission].duration, slot, gap)) {
        return std::nullopt;
      }
    }
  }
  std::sort(placed.begin(), placed.end(),
            [](const auto& a, const auto& b) { return a.mission < b.mission; });
  return placed;
}

std::vector<EffectiveSubinterval> strip_subintervals(const SchedulingInstance& instance,
                                                     const FeasibleInterval& interval) {
  const auto& windows = instance.windows();
  const Seconds stabilize = instance.resources()[interval.resource].stabilize;
  std::vector<EffectiveSubinterval> found;

  auto emit = [&](const std::vector<std::size_t>& remaining) {
    if (remaining.empty()) return;
    Seconds begin = std::numeric_limits<Seconds>::infinity();
    Seconds end = -begin;
    for (auto w : remaining) {
      begin = std::min(begin, windows[w].begin);
      end = std::max(end, windows[w].end);
    }
    EffectiveSubinterval sub{interval.resource, begin, end, {}, 0};
    for (auto w : interval.members) {
      if (windows[w].begin >= begin - kTimeEps && windows[w].end <= end + kTimeEps) {
        sub.candidates.push_back(w);
      }
    }
    for (const auto& f : found) {
      if (same_span(f, sub)) return;
    }
    const auto durations = mission_durations(instance, sub.candidates);
    sub.capacity = max_assignable(sub.length(), durations, stabilize);
    if (static_cast<int>(durations.size()) > sub.capacity) found.push_back(std::move(sub));
  };

  // Earliest start: drop every window that covers the first time-piece.
  {
    std::vector<std::size_t> remaining = interval.members;
    while (!remaining.empty()) {
      emit(remaining);
      Seconds first = std::numeric_limits<Seconds>::infinity();
      for (auto w : remaining) first = std::min(first, windows[w].begin);
      std::erase_if(remaining, [&](std::size_t w) { return windows[w].begin <= first + kTimeEps; });
    }
  }
  // Latest end: drop every window that covers the last time-piece.
  {
    std::vector<std::size_t> remaining = interval.members;
    while (!remaining.empty()) {
      emit(remaining);
      Seconds last = -std::numeric_limits<Seconds>::infinity();
      for (auto w : remaining) last = std::max(last, windows[w].end);
      std::erase_if(remaining, [&](std::size_t w) { return windows[w].end >= last - kTimeEps; });
    }
  }
  // Largest span: drop the longest window first.
  {
    std::vector<std::size_t> remaining = interval.members;
    while (!remaining.empty()) {
      emit(remaining);
      auto longest = std::max_element(remaining.begin(), remaining.end(),
                                      [&](std::size_t a, std::size_t b) {
                                        return windows[a].length() < windows[b].length();
                                      });
      remaining.erase(longest);
    }
  }

  std::sort(found.begin(), found.end(), span_less);
  return found;
}

SubintervalResult effective_subintervals(const SchedulingInstance& instance,
                                         const FeasibleInterval& interval,
                                         std::span<const Slot> fixed) {
  if (interval.members.empty()) return {};
  if (auto direct = assign_interval_directly(instance, interval, fixed)) {
    return {std::move(*direct), {}};
  }
  return {{}, strip_subintervals(instance, interval)};
}

PreprocessResult preassign_free_windows(const SchedulingInstance& instance) {
  return preprocess(instance, {.preassign = true, .interval_assignment = false, .subintervals = false});
}

std::vector<EffectiveSubinterval> generate_subintervals(const SchedulingInstance& instance) {
  const auto l = static_cast<std::ptrdiff_t>(instance.resource_count());
  std::vector<std::vector<EffectiveSubinterval>> per_resource(instance.resource_count());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < l; ++j) {
    per_resource[j] = subintervals_of_resource(instance, static_cast<std::size_t>(j));
  }
  std::vector<EffectiveSubinterval> out;
  for (auto& part : per_resource) {
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

std::vector<EffectiveSubinterval> generate_subintervals_serial(
    const SchedulingInstance& instance) {
  std::vector<EffectiveSubinterval> out;
  for (std::size_t j = 0; j < instance.resource_count(); ++j) {
    auto part = subintervals_of_resource(instance, j);
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

PreprocessResult preprocess(const SchedulingInstance& instance,
                            const PreprocessOptions& options) {
  const auto& windows = instance.windows();
  std::vector<bool> alive(windows.size(), true);
  std::vector<bool> fixed_mission(instance.mission_count(), false);
  std::vector<Seconds> used(instance.resource_count(), 0.0);
  std::vector<std::vector<Slot>> fixed(instance.resource_count());
  std::vector<PreassignedObservation> preassigned;

  auto commit = [&](const PreassignedObservation& p) {
    preassigned.push_back(p);
    fixed_mission[p.mission] = true;
    const Seconds duration = instance.missions()[p.mission].duration;
    used[p.resource] += duration;
    fixed[p.resource].emplace_back(p.start, duration);
    for (std::size_t w = 0; w < windows.size(); ++w) {
      if (windows[w].mission == p.mission) alive[w] = false;
    }
  };

  bool changed = options.preassign;
  while (changed) {
    changed = false;
    const auto slack = usage_slack(instance, alive, used);

    for (std::size_t i = 0; i < instance.mission_count(); ++i) {
      if (fixed_mission[i]) continue;
      for (std::size_t w = 0; w < windows.size(); ++w) {
        const auto& win = windows[w];
        if (!alive[w] || win.mission != i || !slack[win.resource]) continue;
        std::vector<std::size_t> blockers;
        for (std::size_t o = 0; o < windows.size(); ++o) {
          if (alive[o] && windows[o].resource == win.resource && windows[o].mission != i) {
            blockers.push_back(o);
          }
        }
        const Seconds gap = setup_time_bound(instance.resources()[win.resource]);
        if (auto start = earliest_free_start(instance, win, blockers, fixed[win.resource], gap)) {
          commit({i, win.resource, w, *start});
          changed = true;
          break;
        }
      }
    }

    for (std::size_t j = 0; j < instance.resource_count(); ++j) {
      if (!slack[j] || !options.interval_assignment) continue;
      bool again = true;
      while (again) {
        again = false;
        std::vector<std::size_t> live;
        for (std::size_t w = 0; w < windows.size(); ++w) {
          if (alive[w] && windows[w].resource == j) live.push_back(w);
        }
        // Isolation is checked against live windows only.
        std::vector<VisibleWindow> live_windows;
        for (auto w : live) live_windows.push_back(windows[w]);
        const auto restricted = instance.with_windows(std::move(live_windows));
        std::vector<std::size_t> all_live(live.size());
        std::iota(all_live.begin(), all_live.end(), 0);
        for (const auto& local : build_feasible_intervals(restricted, all_live)) {
          if (auto direct = assign_interval_directly(restricted, local, fixed[j])) {
            for (auto p : *direct) {
              p.window = live[p.window];
              commit(p);
            }
            changed = true;
            again = true;
            break;
          }
        }
      }
    }
  }

  std::vector<VisibleWindow> remaining;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    if (alive[w]) remaining.push_back(windows[w]);
  }
  std::sort(preassigned.begin(), preassigned.end(),
            [](const auto& a, const auto& b) { return a.mission < b.mission; });

  PreprocessResult out{std::move(preassigned), instance.with_windows(std::move(remaining)), {}};
  if (options.subintervals) out.subintervals = generate_subintervals(out.reduced);
  return out;
}

InstanceStats summarize_stats(std::size_t mission_count, std::vector<ResourceStats> per_resource) {
  InstanceStats out;
  out.per_resource = std::move(per_resource);
  if (mission_count > 0) {
    std::size_t windows = 0;
    Seconds visible = 0.0;
    for (const auto& s : out.per_resource) {
      windows += s.window_count;
      visible += s.total_visible;
    }
    out.paon = static_cast<double>(windows) / static_cast<double>(mission_count);
    out.paot = visible / static_cast<double>(mission_count);
  }
  return out;
}

std::optional<double> contention_degree(Seconds total_visible, Seconds feasible_time) {
  if (!(feasible_time > 0.0)) return std::nullopt;
  return (total_visible - feasible_time) / feasible_time;
}

InstanceStats resource_stats(const SchedulingInstance& instance) {
  const auto l = static_cast<std::ptrdiff_t>(instance.resource_count());
  std::vector<ResourceStats> per_resource(instance.resource_count());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < l; ++j) {
    per_resource[j] = stats_of_resource(instance, static_cast<std::size_t>(j));
  }
  return summarize_stats(instance.mission_count(), std::move(per_resource));
}

InstanceStats resource_stats_serial(const SchedulingInstance& instance) {
  std::vector<ResourceStats> per_resource;
  per_resource.reserve(instance.resource_count());
  for (std::size_t j = 0; j < instance.resource_count(); ++j) {
    per_resource.push_back(stats_of_resource(instance, j));
  }
  return summarize_stats(instance.mission_count(), std::move(per_resource));
}

}  // namespace satsched
