#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace satsched {

/// Time in seconds. Absolute epoch offsets in raw documents, relative to the
/// period start once an instance has been normalized.
using Seconds = double;

/// Absolute tolerance for interval comparisons (seconds).
inline constexpr Seconds kTimeEps = 1e-9;

/// Optional `schema` tag of instance documents; always written.
inline constexpr const char* kInstanceSchema = "satsched.instance/1";

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SchedulingPeriod {
  Seconds begin = 0.0;
  Seconds end = 0.0;

  Seconds length() const { return end - begin; }
  bool operator==(const SchedulingPeriod&) const = default;
};

struct Mission {
  std::string id;
  Seconds earliest = 0.0;
  Seconds latest = 0.0;
  Seconds duration = 0.0;
  int weight = 1;

  bool operator==(const Mission&) const = default;
};

struct Resource {
  std::string id;
  Seconds max_usage = 0.0;
  double max_swing = 0.0;      // radians
  double swing_rate = 1.0;     // radians / second
  double rotation_rate = 1.0;  // radians / second
  Seconds stabilize = 0.0;

  bool operator==(const Resource&) const = default;
};

/// A visible time window of one mission on one resource. `mission` and
/// `resource` index into the owning instance's vectors.
struct VisibleWindow {
  std::size_t mission = 0;
  std::size_t resource = 0;
  Seconds begin = 0.0;
  Seconds end = 0.0;

  Seconds length() const { return end - begin; }
  bool operator==(const VisibleWindow&) const = default;
};

struct AngleSample {
  double swing = 0.0;     // radians, |swing| <= resource.max_swing
  double rotation = 0.0;  // radians, [0, 2*pi)
};

class SchedulingInstance {
 public:
  SchedulingInstance() = default;
  SchedulingInstance(SchedulingPeriod period, std::vector<Mission> missions,
                     std::vector<Resource> resources,
                     std::vector<VisibleWindow> windows);

  const SchedulingPeriod& period() const { return period_; }
  const std::vector<Mission>& missions() const { return missions_; }
  const std::vector<Resource>& resources() const { return resources_; }
  const std::vector<VisibleWindow>& windows() const { return windows_; }

  std::size_t mission_count() const { return missions_.size(); }
  std::size_t resource_count() const { return resources_.size(); }

  /// Offset that was subtracted from every time by normalization. Adding it
  /// back recovers absolute times.
  Seconds time_shift() const { return time_shift_; }

  std::optional<std::size_t> find_mission(std::string_view id) const;
  std::optional<std::size_t> find_resource(std::string_view id) const;

  /// Indices of the windows of one resource, in document order.
  std::vector<std::size_t> windows_of_resource(std::size_t resource) const;
  /// Indices of the windows of one mission, in document order.
  std::vector<std::size_t> windows_of_mission(std::size_t mission) const;
  /// Position of `window` among the windows of its (mission, resource) pair.
  std::size_t window_rank(std::size_t window) const;

  /// R(M_i): resources that have at least one window for the mission, sorted.
  std::vector<std::size_t> resources_of(std::size_t mission) const;
  /// M(R_j): missions that have at least one window on the resource, sorted.
  std::vector<std::size_t> missions_of(std::size_t resource) const;

  /// Copy with a different window list (missions/resources unchanged).
  SchedulingInstance with_windows(std::vector<VisibleWindow> windows) const;
  SchedulingInstance with_resources(std::vector<Resource> resources) const;

  bool operator==(const SchedulingInstance& other) const;

 private:
  friend SchedulingInstance normalize_and_clip(const SchedulingInstance&);

  void check_invariants() const;

  SchedulingPeriod period_;
  std::vector<Mission> missions_;
  std::vector<Resource> resources_;
  std::vector<VisibleWindow> windows_;
  Seconds time_shift_ = 0.0;
};

/// Parses the JSON instance document. Throws InstanceError on syntax errors
/// (with byte offset), dangling references, unknown keys or invariant
/// violations. `max_usage` defaults to the period length when absent. An
/// optional `manifest_digest` string is accepted and ignored.
SchedulingInstance parse_instance(std::string_view text);

/// Deterministic pretty-printed JSON; parse_instance(serialize_instance(x)) == x.
std::string serialize_instance(const SchedulingInstance& instance);

/// Intersects every window with [E_i, L_i] and the period, drops windows too
/// short for their mission, and shifts all times so the period starts at 0.
SchedulingInstance normalize_and_clip(const SchedulingInstance& instance);

/// True when the period starts at 0 and every window already satisfies the
/// clipping rules.
bool is_normalized(const SchedulingInstance& instance);

/// Exact reorientation time between two pointing states on one resource.
Seconds setup_time_exact(const AngleSample& from, const AngleSample& to,
                         const Resource& resource);

/// Resource-level upper bound on the setup time between any two
/// observations: 2*max_swing/swing_rate + pi/rotation_rate + stabilize.
Seconds setup_time_bound(const Resource& resource);

}  // namespace satsched
