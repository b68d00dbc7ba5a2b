#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "forge/actions.hpp"
#include "forge/profile.hpp"
#include "forge/table.hpp"

namespace forge {

// Grounding checks, evaluated in this order per action; the first failure
// decides the verdict.
//   G1 existence      referenced columns exist in the evolving schema
//   G2 type           numeric ops need Numeric operands, group keys Categorical
//   G3 division       div / reciprocal denominators must not contain zero
//   G4 domain         log1p needs min > -1, sqrt needs min >= 0; argument
//                     ranges; predicted output magnitudes must stay finite
//   G5 name           output names are non-empty and new
//   G6 target safety  the target is never an operand or dropped
//   G7 non-emptiness  selection leaves at least one feature
enum class GroundingCode { G1, G2, G3, G4, G5, G6, G7 };

std::string_view to_string(GroundingCode code);

struct Verdict {
  bool pass = true;
  std::optional<GroundingCode> code;  // set iff !pass
  std::string message;

  static Verdict ok() { return {}; }
  static Verdict fail(GroundingCode code, std::string message) { return {false, code, std::move(message)}; }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct SchemaEntry {
  std::string name;
  ColumnKind kind = ColumnKind::Text;
  friend bool operator==(const SchemaEntry&, const SchemaEntry&) = default;
};

struct GroundingReport {
  std::vector<Verdict> verdicts;  // one per action
  bool plan_admissible = false;   // iff every verdict passes
  // Schema after applying every passing action, in column order.
  std::vector<SchemaEntry> predicted_schema;

  std::size_t failures() const;
};

// Upper bound on |value| that any derived column may reach.
inline constexpr double kMaxMagnitude = 1e300;
// log1p requires min >= -1 + kLog1pMargin.
inline constexpr double kLog1pMargin = 1e-9;
inline constexpr std::size_t kMaxBins = 1000;
inline constexpr std::size_t kMaxPolynomialColumns = 10;

// Validates a plan against the working schema without touching data. An
// action may reference columns created earlier in the same plan; the value
// ranges of such columns are propagated by interval arithmetic. Failures are
// reported in the verdicts, never thrown.
GroundingReport ground_plan(const Plan& plan, std::span<const ColumnProfile> schema,
                            const std::optional<std::string>& target);

// Runs an admissible plan and returns a new table with one provenance entry
// per action. Throws ContractViolation if the plan does not ground against
// the table.
Table execute_plan(const Plan& plan, const Table& table);

// Ordering used by SelectKeepTopK in both grounding and execution: indices
// into `scores`, highest score first, ties by position.
std::vector<std::size_t> rank_for_keep(std::span<const double> scores);

}  // namespace forge
