#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace forge {

// --- the action vocabulary ---------------------------------------------------

enum class UnaryOp { Log1p, Sqrt, Square, Reciprocal, Zscore, Minmax, BinEqualWidth };
enum class BinaryOp { Add, Sub, Mul, Div };
enum class KeepCriterion { TargetCorrelation, Variance };
enum class AggOp { Mean, Min, Max, Count };

struct SelectDrop {
  std::vector<std::string> columns;
  friend bool operator==(const SelectDrop&, const SelectDrop&) = default;
};

struct SelectKeepTopK {
  std::size_t k = 0;
  KeepCriterion criterion = KeepCriterion::TargetCorrelation;
  friend bool operator==(const SelectKeepTopK&, const SelectKeepTopK&) = default;
};

struct TransformUnary {
  UnaryOp op = UnaryOp::Log1p;
  std::string column;
  std::string out_name;
  std::size_t bins = 0;  // BinEqualWidth only
  friend bool operator==(const TransformUnary&, const TransformUnary&) = default;
};

struct TransformBinary {
  BinaryOp op = BinaryOp::Add;
  std::string left;
  std::string right;
  std::string out_name;
  friend bool operator==(const TransformBinary&, const TransformBinary&) = default;
};

struct GeneratePolynomial {
  int degree = 2;
  std::vector<std::string> columns;
  std::string out_prefix;
  friend bool operator==(const GeneratePolynomial&, const GeneratePolynomial&) = default;
};

struct GenerateGroupAgg {
  std::string group_by;
  AggOp agg = AggOp::Mean;
  std::string value;
  std::string out_name;
  friend bool operator==(const GenerateGroupAgg&, const GenerateGroupAgg&) = default;
};

using Action = std::variant<SelectDrop, SelectKeepTopK, TransformUnary, TransformBinary,
                            GeneratePolynomial, GenerateGroupAgg>;

enum class PlanOrigin { Heuristic, Llm, Replay };

inline constexpr std::size_t kMaxPlanActions = 8;

struct Plan {
  std::vector<Action> actions;
  PlanOrigin origin = PlanOrigin::Heuristic;
  std::size_t iteration = 0;
  friend bool operator==(const Plan&, const Plan&) = default;
};

std::string_view to_string(UnaryOp op);
std::string_view to_string(BinaryOp op);
std::string_view to_string(KeepCriterion c);
std::string_view to_string(AggOp op);
std::string_view to_string(PlanOrigin origin);
std::optional<PlanOrigin> parse_plan_origin(std::string_view text);

// Output column names of a degree-2 expansion: squares and pairwise products
// in (i <= j) order, named prefix + "_" + a + "_x_" + b.
std::vector<std::string> polynomial_output_names(const GeneratePolynomial& action);

// --- wire format -------------------------------------------------------------
//
// {"op": <name>, "args": {...}} with op one of select_drop, select_keep_top_k,
// log1p, sqrt, square, reciprocal, zscore, minmax, bin_equal_width, add, sub,
// mul, div, generate_polynomial, generate_group_agg.

nlohmann::json to_json(const Action& action);
// Strict: unknown ops, missing or extra arguments and wrong types throw
// ParseError.
Action action_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Plan& plan);
Plan plan_from_json(const nlohmann::json& j);

// Canonical one-line JSON of an action; stable across runs.
std::string canonical(const Action& action);

// One English sentence, e.g. "Created r = a / b."
std::string describe_action(const Action& action);
// Compact call form for progress lines, e.g. "div(a,b)".
std::string action_signature(const Action& action);

}  // namespace forge
