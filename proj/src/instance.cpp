#include "satsched/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "json.hpp"

namespace satsched {

namespace {

using ordered_json = nlohmann::ordered_json;

void reject_unknown_keys(const nlohmann::json& object,
                         std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  for (const auto& item : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw InstanceError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

const nlohmann::json& require(const nlohmann::json& object, const char* key,
                              const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw InstanceError("missing key '" + std::string(key) + "' in " + where);
  }
  return *it;
}

double number_at(const nlohmann::json& object, const char* key,
                 const std::string& where) {
  const auto& value = require(object, key, where);
  if (!value.is_number()) {
    throw InstanceError("'" + std::string(key) + "' in " + where +
                        " must be a number");
  }
  double x = value.get<double>();
  if (!std::isfinite(x)) {
    throw InstanceError("'" + std::string(key) + "' in " + where +
                        " must be finite");
  }
  return x;
}

std::string string_at(const nlohmann::json& object, const char* key,
                      const std::string& where) {
  const auto& value = require(object, key, where);
  if (!value.is_string()) {
    throw InstanceError("'" + std::string(key) + "' in " + where +
                        " must be a string");
  }
  return value.get<std::string>();
}

const nlohmann::json& array_at(const nlohmann::json& object, const char* key) {
  const auto& value = require(object, key, "document");
  if (!value.is_array()) {
    throw InstanceError("'" + std::string(key) + "' must be an array");
  }
  return value;
}

}  // namespace

SchedulingInstance::SchedulingInstance(SchedulingPeriod period,
                                       std::vector<Mission> missions,
                                       std::vector<Resource> resources,
                                       std::vector<VisibleWindow> windows)
    : period_(period),
      missions_(std::move(missions)),
      resources_(std::move(resources)),
      windows_(std::move(windows)) {
  check_invariants();
}

void SchedulingInstance::check_invariants() const {
  if (period_.begin < 0.0 || !(period_.end > period_.begin)) {
    throw InstanceError("period must satisfy 0 <= begin < end");
  }
  std::set<std::string_view> ids;
  for (const auto& m : missions_) {
    if (m.id.empty()) throw InstanceError("mission id must not be empty");
    if (!ids.insert(m.id).second) {
      throw InstanceError("duplicate mission id '" + m.id + "'");
    }
    if (!(m.earliest <= m.latest)) {
      throw InstanceError("mission '" + m.id + "': earliest > latest");
    }
    if (!(m.duration > 0.0)) {
      throw InstanceError("mission '" + m.id + "': duration must be positive");
    }
    if (m.weight < 1) {
      throw InstanceError("mission '" + m.id + "': weight must be >= 1");
    }
  }
  ids.clear();
  for (const auto& r : resources_) {
    if (r.id.empty()) throw InstanceError("resource id must not be empty");
    if (!ids.insert(r.id).second) {
      throw InstanceError("duplicate resource id '" + r.id + "'");
    }
    if (!(r.swing_rate > 0.0) || !(r.rotation_rate > 0.0)) {
      throw InstanceError("resource '" + r.id + "': rates must be positive");
    }
    if (r.stabilize < 0.0 || r.max_swing < 0.0) {
      throw InstanceError("resource '" + r.id +
                          "': stabilize and max_swing must be nonnegative");
    }
    if (!(r.max_usage > 0.0)) {
      throw InstanceError("resource '" + r.id + "': max_usage must be positive");
    }
  }
  for (const auto& w : windows_) {
    if (w.mission >= missions_.size() || w.resource >= resources_.size()) {
      throw InstanceError("window references an undeclared mission or resource");
    }
    if (!(w.begin < w.end)) {
      throw InstanceError("window of mission '" + missions_[w.mission].id +
                          "' on '" + resources_[w.resource].id +
                          "' must satisfy begin < end");
    }
  }
}

std::optional<std::size_t> SchedulingInstance::find_mission(std::string_view id) const {
  for (std::size_t i = 0; i < missions_.size(); ++i) {
    if (missions_[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> SchedulingInstance::find_resource(std::string_view id) const {
  for (std::size_t j = 0; j < resources_.size(); ++j) {
    if (resources_[j].id == id) return j;
  }
  return std::nullopt;
}

std::vector<std::size_t> SchedulingInstance::windows_of_resource(std::size_t resource) const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < windows_.size(); ++w) {
    if (windows_[w].resource == resource) out.push_back(w);
  }
  return out;
}

std::vector<std::size_t> SchedulingInstance::windows_of_mission(std::size_t mission) const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < windows_.size(); ++w) {
    if (windows_[w].mission == mission) out.push_back(w);
  }
  return out;
}

std::size_t SchedulingInstance::window_rank(std::size_t window) const {
  const auto& target = windows_.at(window);
  std::size_t rank = 0;
  for (std::size_t w = 0; w < window; ++w) {
    if (windows_[w].mission == target.mission &&
        windows_[w].resource == target.resource) {
      ++rank;
    }
  }
  return rank;
}

std::vector<std::size_t> SchedulingInstance::resources_of(std::size_t mission) const {
  std::set<std::size_t> out;
  for (const auto& w : windows_) {
    if (w.mission == mission) out.insert(w.resource);
  }
  return {out.begin(), out.end()};
}

std::vector<std::size_t> SchedulingInstance::missions_of(std::size_t resource) const {
  std::set<std::size_t> out;
  for (const auto& w : windows_) {
    if (w.resource == resource) out.insert(w.mission);
  }
  return {out.begin(), out.end()};
}

SchedulingInstance SchedulingInstance::with_windows(std::vector<VisibleWindow> windows) const {
  SchedulingInstance copy = *this;
  copy.windows_ = std::move(windows);
  copy.check_invariants();
  return copy;
}

SchedulingInstance SchedulingInstance::with_resources(std::vector<Resource> resources) const {
  SchedulingInstance copy = *this;
  copy.resources_ = std::move(resources);
  copy.check_invariants();
  return copy;
}

bool SchedulingInstance::operator==(const SchedulingInstance& other) const {
  return period_ == other.period_ && missions_ == other.missions_ &&
         resources_ == other.resources_ && windows_ == other.windows_;
}

SchedulingInstance parse_instance(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw InstanceError("syntax error at byte " + std::to_string(e.byte) + ": " +
                        e.what());
  }
  if (!doc.is_object()) throw InstanceError("instance document must be an object");
  reject_unknown_keys(
      doc, {"schema", "manifest_digest", "period", "missions", "resources", "windows"},
      "document");
  if (doc.contains("manifest_digest") && !doc["manifest_digest"].is_string()) {
    throw InstanceError("manifest_digest must be a string");
  }
  if (doc.contains("schema") && doc["schema"] != kInstanceSchema) {
    throw InstanceError("unsupported schema " + doc["schema"].dump());
  }

  const auto& period_json = require(doc, "period", "document");
  if (!period_json.is_object()) throw InstanceError("'period' must be an object");
  reject_unknown_keys(period_json, {"begin", "end"}, "period");
  SchedulingPeriod period{number_at(period_json, "begin", "period"),
                          number_at(period_json, "end", "period")};

  std::vector<Mission> missions;
  for (const auto& m : array_at(doc, "missions")) {
    const std::string where = "missions[" + std::to_string(missions.size()) + "]";
    if (!m.is_object()) throw InstanceError(where + " must be an object");
    reject_unknown_keys(m, {"id", "earliest", "latest", "duration", "weight"}, where);
    Mission mission;
    mission.id = string_at(m, "id", where);
    mission.earliest = number_at(m, "earliest", where);
    mission.latest = number_at(m, "latest", where);
    mission.duration = number_at(m, "duration", where);
    const auto& weight = require(m, "weight", where);
    if (!weight.is_number_integer()) {
      throw InstanceError("'weight' in " + where + " must be an integer");
    }
    mission.weight = weight.get<int>();
    missions.push_back(std::move(mission));
  }

  std::vector<Resource> resources;
  for (const auto& r : array_at(doc, "resources")) {
    const std::string where = "resources[" + std::to_string(resources.size()) + "]";
    if (!r.is_object()) throw InstanceError(where + " must be an object");
    reject_unknown_keys(r,
                        {"id", "max_usage", "max_swing", "swing_rate",
                         "rotation_rate", "stabilize"},
                        where);
    Resource resource;
    resource.id = string_at(r, "id", where);
    resource.max_usage = r.contains("max_usage") ? number_at(r, "max_usage", where)
                                                 : period.length();
    resource.max_swing = number_at(r, "max_swing", where);
    resource.swing_rate = number_at(r, "swing_rate", where);
    resource.rotation_rate = number_at(r, "rotation_rate", where);
    resource.stabilize = number_at(r, "stabilize", where);
    resources.push_back(std::move(resource));
  }

  SchedulingInstance lookup(period, missions, resources, {});
  std::vector<VisibleWindow> windows;
  for (const auto& w : array_at(doc, "windows")) {
    const std::string where = "windows[" + std::to_string(windows.size()) + "]";
    if (!w.is_object()) throw InstanceError(where + " must be an object");
    reject_unknown_keys(w, {"mission", "resource", "begin", "end"}, where);
    const auto mission_id = string_at(w, "mission", where);
    const auto resource_id = string_at(w, "resource", where);
    auto mission = lookup.find_mission(mission_id);
    if (!mission) {
      throw InstanceError(where + " references undeclared mission '" + mission_id + "'");
    }
    auto resource = lookup.find_resource(resource_id);
    if (!resource) {
      throw InstanceError(where + " references undeclared resource '" + resource_id +
                          "'");
    }
    windows.push_back({*mission, *resource, number_at(w, "begin", where),
                       number_at(w, "end", where)});
  }
  return SchedulingInstance(period, std::move(missions), std::move(resources),
                            std::move(windows));
}

std::string serialize_instance(const SchedulingInstance& instance) {
  ordered_json doc;
  doc["schema"] = kInstanceSchema;
  doc["period"] = {{"begin", instance.period().begin}, {"end", instance.period().end}};
  doc["missions"] = ordered_json::array();
  for (const auto& m : instance.missions()) {
    doc["missions"].push_back({{"id", m.id},
                               {"earliest", m.earliest},
                               {"latest", m.latest},
                               {"duration", m.duration},
                               {"weight", m.weight}});
  }
  doc["resources"] = ordered_json::array();
  for (const auto& r : instance.resources()) {
    doc["resources"].push_back({{"id", r.id},
                                {"max_usage", r.max_usage},
                                {"max_swing", r.max_swing},
                                {"swing_rate", r.swing_rate},
                                {"rotation_rate", r.rotation_rate},
                                {"stabilize", r.stabilize}});
  }
  doc["windows"] = ordered_json::array();
  for (const auto& w : instance.windows()) {
    doc["windows"].push_back({{"mission", instance.missions()[w.mission].id},
                              {"resource", instance.resources()[w.resource].id},
                              {"begin", w.begin},
                              {"end", w.end}});
  }
  return doc.dump(2) + "\n";
}

SchedulingInstance normalize_and_clip(const SchedulingInstance& instance) {
  const Seconds shift = instance.period().begin;
  const SchedulingPeriod period{0.0, instance.period().end - shift};

  std::vector<Mission> missions = instance.missions();
  for (auto& m : missions) {
    m.earliest -= shift;
    m.latest -= shift;
  }

  std::vector<VisibleWindow> windows;
  windows.reserve(instance.windows().size());
  for (const auto& w : instance.windows()) {
    const auto& m = missions[w.mission];
    const Seconds begin = std::max({w.begin - shift, m.earliest, period.begin});
    const Seconds end = std::min({w.end - shift, m.latest, period.end});
    if (end - begin + kTimeEps < m.duration) continue;
    windows.push_back({w.mission, w.resource, begin, end});
  }

  SchedulingInstance out(period, std::move(missions), instance.resources(),
                         std::move(windows));
  out.time_shift_ = instance.time_shift_ + shift;
  return out;
}

bool is_normalized(const SchedulingInstance& instance) {
  if (instance.period().begin != 0.0) return false;
  for (const auto& w : instance.windows()) {
    const auto& m = instance.missions()[w.mission];
    if (w.begin < std::max(m.earliest, 0.0) - kTimeEps) return false;
    if (w.end > std::min(m.latest, instance.period().end) + kTimeEps) return false;
    if (w.length() + kTimeEps < m.duration) return false;
  }
  return true;
}

Seconds setup_time_exact(const AngleSample& from, const AngleSample& to,
                         const Resource& resource) {
  // Rotation can turn either way, so the travel is the shorter arc; this is
  // what keeps the result under the pi / rotation_rate term of the bound.
  const double turn = std::abs(to.rotation - from.rotation);
  const double arc = std::min(turn, 2.0 * std::numbers::pi - turn);
  return std::abs(to.swing - from.swing) / resource.swing_rate + arc / resource.rotation_rate +
         resource.stabilize;
}

Seconds setup_time_bound(const Resource& resource) {
  return 2.0 * resource.max_swing / resource.swing_rate +
         std::numbers::pi / resource.rotation_rate + resource.stabilize;
}

}  // namespace satsched
