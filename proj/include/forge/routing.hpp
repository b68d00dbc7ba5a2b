#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "forge/profile.hpp"

namespace forge {

enum class TaskKind { Classification, Regression, Unsupervised };

std::string_view to_string(TaskKind task);
std::optional<TaskKind> parse_task_kind(std::string_view text);

struct RoutingDecision {
  TaskKind task = TaskKind::Unsupervised;
  std::string rule_fired;  // "R1".."R4"
  std::string rationale;

  friend bool operator==(const RoutingDecision&, const RoutingDecision&) = default;
};

// Task-level router. First match wins:
//   R1 user hint, R2 no target -> unsupervised,
//   R3 categorical/boolean target, or integral numeric target with at most
//      20 distinct values -> classification,
//   R4 otherwise -> regression.
// Throws RoutingError when the target is not among the profiles.
RoutingDecision route_task(std::span<const ColumnProfile> profiles,
                           const std::optional<std::string>& target,
                           std::optional<TaskKind> user_hint = std::nullopt);

}  // namespace forge
