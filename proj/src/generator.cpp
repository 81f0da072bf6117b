#include "satsched/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace satsched {

namespace {

constexpr double kDay = 86400.0;
constexpr Seconds kMinWindow = 10.0;  // longest possible duration

double wrap(double x) { return x - std::floor(x); }

double circular_distance(double a, double b) {
  const double d = std::abs(wrap(a) - wrap(b));
  return std::min(d, 1.0 - d);
}

// 1/16 s grid: exact in binary, so differences of absolute times stay exact.
Seconds quantize(Seconds t) { return std::round(t * 16.0) / 16.0; }

struct Target {
  double lon = 0.0;
  double lat = 0.0;
};

struct Orbit {
  Seconds period = 0.0;
  Seconds phase = 0.0;
  double lon0 = 0.0;
};

}  // namespace

std::string_view to_string(TargetStyle style) {
  switch (style) {
    case TargetStyle::R:
      return "R";
    case TargetStyle::C:
      return "C";
    case TargetStyle::M:
      return "M";
  }
  return "R";
}

std::optional<TargetStyle> parse_style(std::string_view text) {
  if (text == "R" || text == "r") return TargetStyle::R;
  if (text == "C" || text == "c") return TargetStyle::C;
  if (text == "M" || text == "m") return TargetStyle::M;
  return std::nullopt;
}

WindowModel default_window_model(TargetStyle style, std::size_t mission_count) {
  WindowModel w;
  switch (style) {
    case TargetStyle::R:
      w.mean_window = 90.0;
      break;
    case TargetStyle::C:
      w.mean_window = 100.0;
      w.clusters = std::max<std::size_t>(3, mission_count / 8);
      w.spread_lon = 0.01;
      w.spread_lat = 0.04;
      break;
    case TargetStyle::M:
      w.mean_window = 150.0;
      w.clusters = std::max<std::size_t>(2, mission_count / 20);
      w.spread_lon = 0.005;
      w.spread_lat = 0.015;
      break;
  }
  return w;
}

SchedulingInstance generate(const GenSpec& spec) {
  if (spec.mission_count == 0 || spec.resource_count == 0) {
    throw std::invalid_argument("mission and resource counts must be positive");
  }
  if (!(spec.horizon >= kMinWindow)) {
    throw std::invalid_argument("horizon must be at least " + std::to_string(kMinWindow) + " s");
  }
  const WindowModel model = spec.window_model.value_or(default_window_model(spec.style, spec.mission_count));
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Resource> resources;
  std::vector<Orbit> orbits;
  constexpr Seconds kStabilize[] = {25.0, 30.0, 40.0};
  for (std::size_t j = 0; j < spec.resource_count; ++j) {
    const double revolutions = j % 3 == 2 ? 15.22 : 14.737;
    Orbit o;
    o.period = kDay / revolutions;
    o.phase = unit(rng) * o.period;
    o.lon0 = unit(rng);
    orbits.push_back(o);

    Resource r;
    r.id = "R" + std::to_string(j + 1);
    r.max_usage = spec.horizon;
    r.max_swing = 0.3 + 0.1 * unit(rng);
    r.swing_rate = 0.035;
    r.rotation_rate = 0.35;
    r.stabilize = kStabilize[j % 3];
    resources.push_back(std::move(r));
  }

  std::vector<Target> centers(model.clusters);
  for (auto& c : centers) c = {unit(rng), unit(rng)};
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::vector<Target> targets(spec.mission_count);
  for (auto& t : targets) {
    if (centers.empty()) {
      t = {unit(rng), unit(rng)};
    } else {
      const auto& c = centers[static_cast<std::size_t>(unit(rng) * static_cast<double>(centers.size())) %
                              centers.size()];
      t.lon = wrap(c.lon + model.spread_lon * jitter(rng));
      t.lat = std::clamp(c.lat + model.spread_lat * jitter(rng), 0.0, 1.0);
    }
  }

  std::uniform_int_distribution<int> duration(3, 10);
  std::uniform_int_distribution<int> weight(1, 10);
  std::vector<Mission> missions;
  for (std::size_t i = 0; i < spec.mission_count; ++i) {
    Mission m;
    m.id = "M" + std::to_string(i + 1);
    m.earliest = kGeneratorEpoch;
    m.latest = kGeneratorEpoch + spec.horizon;
    m.duration = duration(rng);
    m.weight = weight(rng);
    missions.push_back(std::move(m));
  }

  const double mu = std::log(model.mean_window) - model.sigma * model.sigma / 2.0;
  std::lognormal_distribution<double> length_dist(mu, model.sigma);
  const Seconds pass = std::min(model.pass_length, spec.horizon);
  auto window_in_pass = [&](std::size_t i, std::size_t j, Seconds pass_start) -> std::optional<VisibleWindow> {
    const Seconds lo = std::max(pass_start, 0.0);
    const Seconds hi = std::min(pass_start + pass, spec.horizon);
    if (hi - lo < kMinWindow) return std::nullopt;
    const Seconds len = std::clamp(length_dist(rng), kMinWindow, hi - lo);
    const Seconds center = pass_start + targets[i].lat * pass;
    const Seconds begin = quantize(std::clamp(center - len / 2.0, lo, hi - len));
    const Seconds end = quantize(std::min(begin + len, hi));
    if (end - begin < kMinWindow) return std::nullopt;
    return VisibleWindow{i, j, kGeneratorEpoch + begin, kGeneratorEpoch + end};
  };

  std::vector<std::vector<VisibleWindow>> by_resource(spec.resource_count);
  std::vector<bool> covered(spec.mission_count, false);
  constexpr double kDrift = 0.3819660112501051;  // golden-ratio step between passes
  for (std::size_t j = 0; j < spec.resource_count; ++j) {
    const auto& o = orbits[j];
    for (std::size_t m = 0;; ++m) {
      const Seconds start = o.phase - o.period + static_cast<double>(m) * o.period;
      if (start >= spec.horizon) break;
      const double band = wrap(o.lon0 + static_cast<double>(m) * kDrift);
      for (std::size_t i = 0; i < spec.mission_count; ++i) {
        if (circular_distance(targets[i].lon, band) >= model.band_halfwidth) continue;
        if (auto w = window_in_pass(i, j, start)) {
          by_resource[j].push_back(*w);
          covered[i] = true;
        }
      }
    }
  }

  // Anchor missions the passes missed to a random pass.
  for (std::size_t i = 0; i < spec.mission_count; ++i) {
    while (!covered[i]) {
      const auto j = static_cast<std::size_t>(unit(rng) * static_cast<double>(spec.resource_count)) %
                     spec.resource_count;
      const auto& o = orbits[j];
      const Seconds start = o.phase - o.period +
                            std::floor(unit(rng) * (spec.horizon / o.period + 1.0)) * o.period;
      if (auto w = window_in_pass(i, j, start)) {
        by_resource[j].push_back(*w);
        covered[i] = true;
      } else if (spec.horizon < o.period) {
        if (auto fallback = window_in_pass(i, j, 0.0)) {
          by_resource[j].push_back(*fallback);
          covered[i] = true;
        }
      }
    }
  }

  std::vector<VisibleWindow> windows;
  for (auto& ws : by_resource) {
    std::stable_sort(ws.begin(), ws.end(), [](const VisibleWindow& a, const VisibleWindow& b) {
      return a.begin < b.begin;
    });
    windows.insert(windows.end(), ws.begin(), ws.end());
  }
  return SchedulingInstance({kGeneratorEpoch, kGeneratorEpoch + spec.horizon}, std::move(missions),
                            std::move(resources), std::move(windows));
}

}  // namespace satsched
