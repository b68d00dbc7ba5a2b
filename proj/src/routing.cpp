#include "forge/routing.hpp"

#include <algorithm>

#include "forge/errors.hpp"

namespace forge {

std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::Classification: return "classification";
    case TaskKind::Regression: return "regression";
    case TaskKind::Unsupervised: return "unsupervised";
  }
  return "unsupervised";
}

std::optional<TaskKind> parse_task_kind(std::string_view text) {
  if (text == "classification") return TaskKind::Classification;
  if (text == "regression") return TaskKind::Regression;
  if (text == "unsupervised") return TaskKind::Unsupervised;
  return std::nullopt;
}

RoutingDecision route_task(std::span<const ColumnProfile> profiles,
                           const std::optional<std::string>& target,
                           std::optional<TaskKind> user_hint) {
  const ColumnProfile* tp = nullptr;
  if (target) {
    const auto it = std::find_if(profiles.begin(), profiles.end(),
                                 [&](const ColumnProfile& p) { return p.name == *target; });
    if (it == profiles.end()) throw RoutingError("target column '" + *target + "' does not exist");
    tp = &*it;
  }

  if (user_hint)
    return {*user_hint, "R1",
            "User hint overrides inference: task set to " + std::string(to_string(*user_hint)) + "."};
  if (!tp) return {TaskKind::Unsupervised, "R2", "No target column declared, so the task is unsupervised."};

  if (tp->kind == ColumnKind::Categorical || tp->kind == ColumnKind::Boolean)
    return {TaskKind::Classification, "R3",
            "Target '" + tp->name + "' is " + std::string(to_string(tp->kind)) + " with " +
                std::to_string(tp->n_distinct) + " distinct values, so the task is classification."};
  if (tp->kind == ColumnKind::Numeric && tp->n_distinct <= 20 && tp->integral)
    return {TaskKind::Classification, "R3",
            "Target '" + tp->name + "' holds " + std::to_string(tp->n_distinct) +
                " distinct integral values, so the task is classification."};
  return {TaskKind::Regression, "R4",
          "Target '" + tp->name + "' is " + std::string(to_string(tp->kind)) + " with " +
              std::to_string(tp->n_distinct) + " distinct values, so the task is regression."};
}

}  // namespace forge
