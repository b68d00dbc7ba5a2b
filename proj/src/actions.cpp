#include "forge/actions.hpp"

#include <array>
#include <set>
#include <utility>

#include "forge/errors.hpp"

namespace forge {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<UnaryOp, std::string_view>, 7> kUnaryNames{{
    {UnaryOp::Log1p, "log1p"},
    {UnaryOp::Sqrt, "sqrt"},
    {UnaryOp::Square, "square"},
    {UnaryOp::Reciprocal, "reciprocal"},
    {UnaryOp::Zscore, "zscore"},
    {UnaryOp::Minmax, "minmax"},
    {UnaryOp::BinEqualWidth, "bin_equal_width"},
}};

constexpr std::array<std::pair<BinaryOp, std::string_view>, 4> kBinaryNames{{
    {BinaryOp::Add, "add"},
    {BinaryOp::Sub, "sub"},
    {BinaryOp::Mul, "mul"},
    {BinaryOp::Div, "div"},
}};

std::string_view binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
  }
  return "?";
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

// Argument reader that rejects missing, mistyped and unexpected keys.
class Args {
 public:
  Args(const json& args, std::string_view op) : args_(args), op_(op) {
    if (!args_.is_object()) fail("\"args\" must be an object");
  }

  std::string str(const char* key) {
    const json& v = get(key);
    if (!v.is_string()) fail(std::string("\"") + key + "\" must be a string");
    return v.get<std::string>();
  }

  std::vector<std::string> str_list(const char* key) {
    const json& v = get(key);
    if (!v.is_array()) fail(std::string("\"") + key + "\" must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
      if (!e.is_string()) fail(std::string("\"") + key + "\" must be an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  std::size_t count(const char* key) {
    const json& v = get(key);
    if (!v.is_number_integer() && !v.is_number_unsigned())
      fail(std::string("\"") + key + "\" must be a non-negative integer");
    if (v.is_number_integer() && v.get<long long>() < 0)
      fail(std::string("\"") + key + "\" must be a non-negative integer");
    return v.get<std::size_t>();
  }

  void done() const {
    for (const auto& [key, _] : args_.items())
      if (!used_.contains(key)) fail("unexpected argument \"" + key + "\"");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("action \"" + std::string(op_) + "\": " + what);
  }

 private:
  const json& get(const char* key) {
    const auto it = args_.find(key);
    if (it == args_.end()) fail(std::string("missing argument \"") + key + "\"");
    used_.insert(key);
    return *it;
  }

  const json& args_;
  std::string_view op_;
  std::set<std::string> used_;
};

}  // namespace

std::string_view to_string(UnaryOp op) {
  for (const auto& [k, name] : kUnaryNames)
    if (k == op) return name;
  return "?";
}

std::string_view to_string(BinaryOp op) {
  for (const auto& [k, name] : kBinaryNames)
    if (k == op) return name;
  return "?";
}

std::string_view to_string(KeepCriterion c) {
  return c == KeepCriterion::TargetCorrelation ? "target_correlation" : "variance";
}

std::string_view to_string(AggOp op) {
  switch (op) {
    case AggOp::Mean: return "mean";
    case AggOp::Min: return "min";
    case AggOp::Max: return "max";
    case AggOp::Count: return "count";
  }
  return "?";
}

std::string_view to_string(PlanOrigin origin) {
  switch (origin) {
    case PlanOrigin::Heuristic: return "heuristic";
    case PlanOrigin::Llm: return "llm";
    case PlanOrigin::Replay: return "replay";
  }
  return "?";
}

std::optional<PlanOrigin> parse_plan_origin(std::string_view text) {
  if (text == "heuristic") return PlanOrigin::Heuristic;
  if (text == "llm") return PlanOrigin::Llm;
  if (text == "replay") return PlanOrigin::Replay;
  return std::nullopt;
}

std::vector<std::string> polynomial_output_names(const GeneratePolynomial& action) {
  std::vector<std::string> out;
  const auto& cols = action.columns;
  for (std::size_t i = 0; i < cols.size(); ++i)
    for (std::size_t j = i; j < cols.size(); ++j)
      out.push_back(action.out_prefix + "_" + cols[i] + "_x_" + cols[j]);
  return out;
}

json to_json(const Action& action) {
  return std::visit(
      [](const auto& a) -> json {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, SelectDrop>) {
          return {{"op", "select_drop"}, {"args", {{"columns", a.columns}}}};
        } else if constexpr (std::is_same_v<T, SelectKeepTopK>) {
          return {{"op", "select_keep_top_k"},
                  {"args", {{"k", a.k}, {"criterion", std::string(to_string(a.criterion))}}}};
        } else if constexpr (std::is_same_v<T, TransformUnary>) {
          json args = {{"column", a.column}, {"out_name", a.out_name}};
          if (a.op == UnaryOp::BinEqualWidth) args["bins"] = a.bins;
          return {{"op", std::string(to_string(a.op))}, {"args", args}};
        } else if constexpr (std::is_same_v<T, TransformBinary>) {
          return {{"op", std::string(to_string(a.op))},
                  {"args", {{"left", a.left}, {"right", a.right}, {"out_name", a.out_name}}}};
        } else if constexpr (std::is_same_v<T, GeneratePolynomial>) {
          return {{"op", "generate_polynomial"},
                  {"args", {{"degree", a.degree}, {"columns", a.columns}, {"out_prefix", a.out_prefix}}}};
        } else {
          return {{"op", "generate_group_agg"},
                  {"args",
                   {{"group_by", a.group_by},
                    {"agg", std::string(to_string(a.agg))},
                    {"value", a.value},
                    {"out_name", a.out_name}}}};
        }
      },
      action);
}

Action action_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("action must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "op" && key != "args") throw ParseError("unexpected action field \"" + key + "\"");
  const auto op_it = j.find("op");
  if (op_it == j.end() || !op_it->is_string()) throw ParseError("action is missing string field \"op\"");
  const std::string op = op_it->get<std::string>();
  const auto args_it = j.find("args");
  if (args_it == j.end()) throw ParseError("action \"" + op + "\": missing \"args\"");
  Args args(*args_it, op);

  Action out;
  if (op == "select_drop") {
    out = SelectDrop{args.str_list("columns")};
  } else if (op == "select_keep_top_k") {
    SelectKeepTopK a;
    a.k = args.count("k");
    const std::string c = args.str("criterion");
    if (c == "target_correlation") {
      a.criterion = KeepCriterion::TargetCorrelation;
    } else if (c == "variance") {
      a.criterion = KeepCriterion::Variance;
    } else {
      args.fail("unknown criterion \"" + c + "\"");
    }
    out = a;
  } else if (op == "generate_polynomial") {
    GeneratePolynomial a;
    const std::size_t degree = args.count("degree");
    if (degree != 2) args.fail("only degree 2 is supported");
    a.columns = args.str_list("columns");
    a.out_prefix = args.str("out_prefix");
    out = a;
  } else if (op == "generate_group_agg") {
    GenerateGroupAgg a;
    a.group_by = args.str("group_by");
    const std::string agg = args.str("agg");
    if (agg == "mean") {
      a.agg = AggOp::Mean;
    } else if (agg == "min") {
      a.agg = AggOp::Min;
    } else if (agg == "max") {
      a.agg = AggOp::Max;
    } else if (agg == "count") {
      a.agg = AggOp::Count;
    } else {
      args.fail("unknown aggregate \"" + agg + "\"");
    }
    a.value = args.str("value");
    a.out_name = args.str("out_name");
    out = a;
  } else {
    bool matched = false;
    for (const auto& [k, name] : kUnaryNames) {
      if (name != op) continue;
      TransformUnary a;
      a.op = k;
      a.column = args.str("column");
      a.out_name = args.str("out_name");
      if (k == UnaryOp::BinEqualWidth) a.bins = args.count("bins");
      out = a;
      matched = true;
    }
    for (const auto& [k, name] : kBinaryNames) {
      if (name != op) continue;
      TransformBinary a;
      a.op = k;
      a.left = args.str("left");
      a.right = args.str("right");
      a.out_name = args.str("out_name");
      out = a;
      matched = true;
    }
    if (!matched) throw ParseError("unknown action op \"" + op + "\"");
  }
  args.done();
  return out;
}

json to_json(const Plan& plan) {
  json actions = json::array();
  for (const auto& a : plan.actions) actions.push_back(to_json(a));
  return {{"actions", actions}, {"origin", std::string(to_string(plan.origin))}, {"iteration", plan.iteration}};
}

Plan plan_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("plan must be a JSON object");
  Plan plan;
  const auto actions = j.find("actions");
  if (actions == j.end() || !actions->is_array()) throw ParseError("plan is missing \"actions\" array");
  for (const auto& a : *actions) plan.actions.push_back(action_from_json(a));
  const auto origin = j.find("origin");
  if (origin == j.end() || !origin->is_string()) throw ParseError("plan is missing \"origin\"");
  const auto parsed = parse_plan_origin(origin->get<std::string>());
  if (!parsed) throw ParseError("unknown plan origin");
  plan.origin = *parsed;
  const auto it = j.find("iteration");
  if (it == j.end() || !it->is_number_unsigned()) throw ParseError("plan is missing \"iteration\"");
  plan.iteration = it->get<std::size_t>();
  return plan;
}

std::string canonical(const Action& action) { return to_json(action).dump(); }

std::string describe_action(const Action& action) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, SelectDrop>) {
          return std::string(a.columns.size() == 1 ? "Dropped column " : "Dropped columns ") +
                 join(a.columns, ", ") + ".";
        } else if constexpr (std::is_same_v<T, SelectKeepTopK>) {
          if (a.criterion == KeepCriterion::TargetCorrelation)
            return "Kept the " + std::to_string(a.k) + " features most correlated with the target.";
          return "Kept the " + std::to_string(a.k) + " highest-variance features.";
        } else if constexpr (std::is_same_v<T, TransformUnary>) {
          if (a.op == UnaryOp::BinEqualWidth)
            return "Created " + a.out_name + " = " + a.column + " binned into " + std::to_string(a.bins) +
                   " equal-width bins.";
          return "Created " + a.out_name + " = " + std::string(to_string(a.op)) + "(" + a.column + ").";
        } else if constexpr (std::is_same_v<T, TransformBinary>) {
          return "Created " + a.out_name + " = " + a.left + " " + std::string(binary_symbol(a.op)) + " " +
                 a.right + ".";
        } else if constexpr (std::is_same_v<T, GeneratePolynomial>) {
          return "Generated degree-" + std::to_string(a.degree) + " polynomial features with prefix " +
                 a.out_prefix + " from " + join(a.columns, ", ") + ".";
        } else {
          return "Created " + a.out_name + " = " + std::string(to_string(a.agg)) + " of " + a.value +
                 " grouped by " + a.group_by + ".";
        }
      },
      action);
}

std::string action_signature(const Action& action) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, SelectDrop>) {
          return "select_drop(" + join(a.columns, ",") + ")";
        } else if constexpr (std::is_same_v<T, SelectKeepTopK>) {
          return "select_keep_top_k(" + std::to_string(a.k) + "," + std::string(to_string(a.criterion)) + ")";
        } else if constexpr (std::is_same_v<T, TransformUnary>) {
          std::string s = std::string(to_string(a.op)) + "(" + a.column;
          if (a.op == UnaryOp::BinEqualWidth) s += "," + std::to_string(a.bins);
          return s + ")";
        } else if constexpr (std::is_same_v<T, TransformBinary>) {
          return std::string(to_string(a.op)) + "(" + a.left + "," + a.right + ")";
        } else if constexpr (std::is_same_v<T, GeneratePolynomial>) {
          return "generate_polynomial(" + join(a.columns, ",") + ")";
        } else {
          return "generate_group_agg(" + std::string(to_string(a.agg)) + "," + a.value + "," + a.group_by + ")";
        }
      },
      action);
}

}  // namespace forge
