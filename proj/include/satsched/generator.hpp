#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "satsched/instance.hpp"

namespace satsched {

enum class TargetStyle { R, C, M };

std::string_view to_string(TargetStyle style);
std::optional<TargetStyle> parse_style(std::string_view text);

/// 2016-06-01 06:00:00 UTC, the start of every generated period.
inline constexpr Seconds kGeneratorEpoch = 1464760800.0;

/// Synthetic visibility: each resource passes over a longitude band once per
/// revolution, the band drifting between passes. A target inside the band
/// gets one window whose position in the pass follows its latitude.
struct WindowModel {
  double band_halfwidth = 0.02;   // fraction of the longitude circle
  Seconds pass_length = 600.0;
  Seconds mean_window = 90.0;
  double sigma = 0.35;            // log-normal shape of window lengths
  std::size_t clusters = 0;       // 0: targets spread uniformly
  double spread_lon = 0.0;        // cluster standard deviations
  double spread_lat = 0.0;
};

WindowModel default_window_model(TargetStyle style, std::size_t mission_count);

struct GenSpec {
  TargetStyle style = TargetStyle::R;
  std::size_t mission_count = 100;
  std::size_t resource_count = 3;
  Seconds horizon = 86400.0;
  std::uint64_t seed = 1;
  std::optional<WindowModel> window_model;
};

/// Deterministic in `spec`, seed included. Durations and weights are integers in [3,10]
/// and [1,10]; every mission receives at least one window.
SchedulingInstance generate(const GenSpec& spec);

}  // namespace satsched
