#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "forge/errors.hpp"
#include "forge/grounding.hpp"
#include "forge/profile.hpp"

namespace forge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Beyond this magnitude differences of two values may overflow.
constexpr double kHalve = 1e307;

Column numeric_result(std::string name, std::size_t n) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Numeric;
  c.values.assign(n, kNaN);
  c.missing.assign(n, 1);
  return c;
}

template <typename F>
Column map_unary(const Column& x, std::string out, F f) {
  Column c = numeric_result(std::move(out), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x.is_missing(i)) continue;
    c.values[i] = f(x.values[i]);
    c.missing[i] = 0;
  }
  return c;
}

// (x - lo) / (hi - lo) without overflowing on extreme ranges. Requires hi > lo.
double unit_position(double x, double lo, double hi) {
  if (std::max(std::abs(lo), std::abs(hi)) > kHalve) return (x / 2 - lo / 2) / (hi / 2 - lo / 2);
  return (x - lo) / (hi - lo);
}

Column apply_unary(const TransformUnary& a, const Column& x) {
  switch (a.op) {
    case UnaryOp::Log1p: return map_unary(x, a.out_name, [](double v) { return std::log1p(v); });
    case UnaryOp::Sqrt: return map_unary(x, a.out_name, [](double v) { return std::sqrt(v); });
    case UnaryOp::Square: return map_unary(x, a.out_name, [](double v) { return v * v; });
    case UnaryOp::Reciprocal: return map_unary(x, a.out_name, [](double v) { return 1.0 / v; });
    case UnaryOp::Zscore: {
      const Moments m = numeric_moments(x.values, x.missing);
      if (m.count < 2 || m.stddev == 0.0) return map_unary(x, a.out_name, [](double) { return 0.0; });
      const double s = std::max(std::abs(m.min), std::abs(m.max));
      if (s > kHalve)
        return map_unary(x, a.out_name,
                         [&](double v) { return (v / s - m.mean / s) / (m.stddev / s); });
      return map_unary(x, a.out_name, [&](double v) { return (v - m.mean) / m.stddev; });
    }
    case UnaryOp::Minmax: {
      const Moments m = numeric_moments(x.values, x.missing);
      if (m.count == 0 || m.max == m.min) return map_unary(x, a.out_name, [](double) { return 0.0; });
      return map_unary(x, a.out_name, [&](double v) { return unit_position(v, m.min, m.max); });
    }
    case UnaryOp::BinEqualWidth: {
      const Moments m = numeric_moments(x.values, x.missing);
      const auto k = static_cast<double>(a.bins);
      Column c;
      c.name = a.out_name;
      c.kind = ColumnKind::Categorical;
      c.labels.assign(x.size(), std::string{});
      c.missing.assign(x.size(), 1);
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x.is_missing(i)) continue;
        std::size_t bin = 0;
        if (m.max > m.min) {
          const double pos = std::floor(unit_position(x.values[i], m.min, m.max) * k);
          bin = static_cast<std::size_t>(std::clamp(pos, 0.0, k - 1.0));
        }
        c.labels[i] = "b" + std::to_string(bin);
        c.missing[i] = 0;
      }
      return c;
    }
  }
  throw ContractViolation("unknown unary op");
}

Column apply_binary(BinaryOp op, const Column& l, const Column& r, std::string out) {
  Column c = numeric_result(std::move(out), l.size());
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (l.is_missing(i) || r.is_missing(i)) continue;
    const double x = l.values[i], y = r.values[i];
    double v = 0.0;
    switch (op) {
      case BinaryOp::Add: v = x + y; break;
      case BinaryOp::Sub: v = x - y; break;
      case BinaryOp::Mul: v = x * y; break;
      case BinaryOp::Div: v = x / y; break;
    }
    c.values[i] = v;
    c.missing[i] = 0;
  }
  return c;
}

Column apply_group_agg(const GenerateGroupAgg& a, const Column& key, const Column& value) {
  struct Acc {
    std::vector<double> xs;
  };
  std::map<std::string, Acc> groups;
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (key.is_missing(i) || value.is_missing(i)) continue;
    groups[key.labels[i]].xs.push_back(value.values[i]);
  }
  std::map<std::string, double> result;
  for (const auto& [label, acc] : groups) {
    const auto& xs = acc.xs;
    double v = 0.0;
    switch (a.agg) {
      case AggOp::Mean: {
        // Sum of x / n never exceeds max |x|.
        const double n = static_cast<double>(xs.size());
        for (double x : xs) v += x / n;
        v = std::clamp(v, *std::min_element(xs.begin(), xs.end()), *std::max_element(xs.begin(), xs.end()));
        break;
      }
      case AggOp::Min: v = *std::min_element(xs.begin(), xs.end()); break;
      case AggOp::Max: v = *std::max_element(xs.begin(), xs.end()); break;
      case AggOp::Count: v = static_cast<double>(xs.size()); break;
    }
    result.emplace(label, v);
  }
  Column c = numeric_result(a.out_name, key.size());
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (key.is_missing(i)) continue;
    const auto it = result.find(key.labels[i]);
    if (it == result.end()) continue;
    c.values[i] = it->second;
    c.missing[i] = 0;
  }
  return c;
}

Table apply_keep(const SelectKeepTopK& a, const Table& t) {
  std::vector<std::size_t> candidates;
  for (std::size_t i : t.feature_indices())
    if (t.column(i).kind == ColumnKind::Numeric) candidates.push_back(i);

  std::vector<double> scores;
  if (a.criterion == KeepCriterion::TargetCorrelation) {
    const Column& target = t.column(*t.target());
    const auto y = encode_target(target);
    for (std::size_t i : candidates) {
      const Column& c = t.column(i);
      const auto r = pearson(c.values, c.missing, y, target.missing);
      scores.push_back(r ? std::abs(*r) : 0.0);
    }
  } else {
    for (std::size_t i : candidates) {
      const Column& c = t.column(i);
      scores.push_back(numeric_moments(c.values, c.missing).stddev);
    }
  }
  const auto order = rank_for_keep(scores);
  std::vector<std::string> drop;
  for (std::size_t r = a.k; r < order.size(); ++r) drop.push_back(t.column(candidates[order[r]]).name);
  return t.without(drop);
}

Table apply_action(const Action& action, const Table& t) {
  return std::visit(
      [&t](const auto& a) -> Table {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, SelectDrop>) {
          return t.without(a.columns);
        } else if constexpr (std::is_same_v<T, SelectKeepTopK>) {
          return apply_keep(a, t);
        } else if constexpr (std::is_same_v<T, TransformUnary>) {
          return t.with_column(apply_unary(a, t.column(a.column)));
        } else if constexpr (std::is_same_v<T, TransformBinary>) {
          return t.with_column(apply_binary(a.op, t.column(a.left), t.column(a.right), a.out_name));
        } else if constexpr (std::is_same_v<T, GeneratePolynomial>) {
          const auto names = polynomial_output_names(a);
          Table out = t;
          std::size_t k = 0;
          for (std::size_t i = 0; i < a.columns.size(); ++i)
            for (std::size_t j = i; j < a.columns.size(); ++j)
              out = out.with_column(
                  apply_binary(BinaryOp::Mul, t.column(a.columns[i]), t.column(a.columns[j]), names[k++]));
          return out;
        } else {
          return t.with_column(apply_group_agg(a, t.column(a.group_by), t.column(a.value)));
        }
      },
      action);
}

}  // namespace

Table execute_plan(const Plan& plan, const Table& table) {
  const auto schema = profile(table);
  const GroundingReport grounding = ground_plan(plan, schema, table.target());
  if (!grounding.plan_admissible) {
    std::string why;
    for (std::size_t i = 0; i < grounding.verdicts.size(); ++i) {
      const auto& v = grounding.verdicts[i];
      if (v.pass) continue;
      why = "action " + std::to_string(i + 1) + " " + std::string(to_string(*v.code)) + ": " + v.message;
      break;
    }
    throw ContractViolation("execute_plan called with an inadmissible plan (" + why + ")");
  }
  Table out = table;
  for (const auto& action : plan.actions) out = apply_action(action, out).with_provenance(canonical(action));
  return out;
}

}  // namespace forge
