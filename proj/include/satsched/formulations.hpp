#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "satsched/instance.hpp"
#include "satsched/linear_model.hpp"
#include "satsched/schedule.hpp"
#include "satsched/windowing.hpp"

namespace satsched {

enum class ObjectiveKind { Count, Weight };

std::string_view to_string(ObjectiveKind kind);
std::optional<ObjectiveKind> parse_objective_kind(std::string_view text);

/// Profit of one mission under the objective.
inline long mission_profit(const Mission& m, ObjectiveKind kind) {
  return kind == ObjectiveKind::Weight ? m.weight : 1;
}

/// Relation between two windows of different missions on one resource.
enum class PairClass {
  OrderedFirstSecond,  // disjoint, first window earlier, setup gap must be enforced
  OrderedSecondFirst,
  Overlapping,
  Independent,  // far enough apart that the setup gap always holds
};

std::string_view to_string(PairClass c);

/// `setup` is the resource bound Δ_j. Throws std::invalid_argument when both
/// windows belong to the same mission.
PairClass classify_pair(const VisibleWindow& first, const VisibleWindow& second, Seconds setup);

/// U = period length + longest duration + largest setup bound.
Seconds big_m(const SchedulingInstance& instance);

enum class FormulationKind { Baseline, Improved };

std::string_view to_string(FormulationKind kind);
std::optional<FormulationKind> parse_formulation_kind(std::string_view text);

/// Sequencing binary: `later` is observed after `earlier` on `resource`.
/// Window fields are kUnknownIndex in the baseline, which sequences missions.
struct OrderVar {
  std::size_t var = 0;
  std::size_t resource = 0;
  std::size_t later = 0;
  std::size_t earlier = 0;
  std::size_t later_window = kUnknownIndex;
  std::size_t earlier_window = kUnknownIndex;
};

/// A built model plus the map from instance entities to its variables.
/// Window and mission indices refer to the reduced instance of the
/// preprocessing result the model was built from.
struct Formulation {
  FormulationKind kind = FormulationKind::Baseline;
  LinearModel model;
  std::vector<std::size_t> x_of_window;   // per reduced window
  std::vector<std::size_t> t_of_mission;  // baseline, kUnknownIndex if absent
  std::vector<std::size_t> t_of_window;   // improved
  std::vector<OrderVar> order_vars;
};

/// `prep` must come from preprocess(instance, ...) on this normalized instance.
Formulation build_baseline(const SchedulingInstance& instance, const PreprocessResult& prep,
                           ObjectiveKind objective);
Formulation build_improved(const SchedulingInstance& instance, const PreprocessResult& prep,
                           ObjectiveKind objective);
Formulation build_formulation(FormulationKind kind, const SchedulingInstance& instance,
                              const PreprocessResult& prep, ObjectiveKind objective);

ModelStats report_model(const LinearModel& model);

/// Variable values representing a schedule of the reduced instance. Missions
/// fixed during preprocessing are skipped. Each observation goes to a window
/// holding it, the named one if possible. Throws std::invalid_argument when
/// no window on its resource holds it and the named window does not exist.
std::vector<double> embed_schedule(const Formulation& formulation, const PreprocessResult& prep,
                                   const Schedule& schedule);

/// Schedule encoded by integral variable values, preassigned missions
/// included. `instance` is the normalized instance `prep` came from.
Schedule extract_schedule(const Formulation& formulation, const SchedulingInstance& instance,
                          const PreprocessResult& prep, std::span<const double> values);

/// Schedule of the preassigned missions alone.
std::vector<Assignment> preassigned_assignments(const SchedulingInstance& instance,
                                                const PreprocessResult& prep);

}  // namespace satsched
