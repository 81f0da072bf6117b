#pragma once

#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "satsched/instance.hpp"

namespace fixture {

using satsched::Mission;
using satsched::Resource;
using satsched::SchedulingInstance;

struct W {
  std::string mission;
  std::string resource;
  double begin;
  double end;
};

inline Mission mission(std::string id, double duration, int weight = 1, double earliest = 0.0,
                       double latest = 1e9) {
  return {std::move(id), earliest, latest, duration, weight};
}

/// Resource whose setup bound is exactly `stabilize + extra`: no swing
/// travel, and a rotation term of `extra` (vanishing when extra is 0).
inline Resource resource(std::string id, double stabilize, double extra = 0.0,
                         double max_usage = 1e9) {
  Resource r;
  r.id = std::move(id);
  r.max_usage = max_usage;
  r.max_swing = 0.0;
  r.swing_rate = 1.0;
  r.rotation_rate = extra > 0.0 ? std::numbers::pi / extra : 1e300;
  r.stabilize = stabilize;
  return r;
}

inline SchedulingInstance make(double begin, double end, std::vector<Mission> missions,
                               std::vector<Resource> resources, const std::vector<W>& windows) {
  for (auto& m : missions) {
    m.earliest = std::max(m.earliest, begin);
    m.latest = std::min(m.latest, end);
  }
  for (auto& r : resources) r.max_usage = std::min(r.max_usage, end - begin);
  std::vector<satsched::VisibleWindow> ws;
  auto index_of = [](const auto& list, const std::string& id) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i].id == id) return i;
    }
    throw std::invalid_argument("fixture: unknown id " + id);
  };
  for (const auto& w : windows) {
    ws.push_back({index_of(missions, w.mission), index_of(resources, w.resource), w.begin, w.end});
  }
  return SchedulingInstance({begin, end}, std::move(missions), std::move(resources), std::move(ws));
}

struct TinyShape {
  int max_missions = 8;
  int max_resources = 3;
  int max_windows_per_mission = 3;
  int max_windows = 20;
  int min_missions = 1;
};

/// Small random instance on an integer time grid, crowded enough that
/// windows conflict. Some missions get tight [E, L], some resources a tight
/// usage budget, and some windows stick out of the period, so clipping and
/// every constraint family are exercised.
inline SchedulingInstance random_tiny(std::mt19937_64& rng, const TinyShape& shape = {}) {
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto chance = [&](double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; };

  const int horizon = uniform(60, 240);
  const double begin = 1000.0 * uniform(0, 3);
  const double end = begin + horizon;
  const int n = uniform(shape.min_missions, shape.max_missions);
  const int l = uniform(1, shape.max_resources);

  std::vector<Mission> missions;
  for (int i = 0; i < n; ++i) {
    Mission m = mission("m" + std::to_string(i), uniform(3, 10), uniform(1, 10), begin, end);
    if (chance(0.15)) {
      m.earliest = begin + uniform(0, horizon / 2);
      m.latest = std::min(end, m.earliest + uniform(20, horizon));
    }
    missions.push_back(m);
  }
  std::vector<Resource> resources;
  constexpr double kStabilize[] = {2.0, 5.0, 10.0};
  for (int j = 0; j < l; ++j) {
    const double extra = chance(0.5) ? 0.0 : 3.0;
    Resource r = resource("r" + std::to_string(j), kStabilize[uniform(0, 2)], extra);
    r.max_usage = chance(0.2) ? uniform(8, 30) : horizon;
    resources.push_back(r);
  }

  std::vector<satsched::VisibleWindow> windows;
  for (int i = 0; i < n; ++i) {
    const int remaining_missions = n - i - 1;
    const int budget = shape.max_windows - static_cast<int>(windows.size()) - remaining_missions;
    const int k = std::min(uniform(1, shape.max_windows_per_mission), std::max(1, budget));
    for (int c = 0; c < k; ++c) {
      const double d = missions[static_cast<std::size_t>(i)].duration;
      const double wb = begin + uniform(-10, horizon - static_cast<int>(d));
      const double we = wb + d + uniform(0, 40);
      windows.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(uniform(0, l - 1)), wb, we});
    }
  }
  return SchedulingInstance({begin, end}, std::move(missions), std::move(resources),
                            std::move(windows));
}

}  // namespace fixture
