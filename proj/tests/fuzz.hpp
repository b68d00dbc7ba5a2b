#pragma once

// Random tables and plans for property tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "forge/actions.hpp"
#include "forge/csv.hpp"
#include "forge/table.hpp"

namespace forge::fuzz {

inline std::size_t pick(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
inline bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline std::string number_cell(std::mt19937_64& rng, int style) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (style) {
    case 0: return format_number(u(rng) * 10.0);                        // positive, small
    case 1: return format_number(std::round(u(rng) * 6.0) - 3.0);       // integral, with zeros
    case 2: return format_number((u(rng) - 0.5) * 2e4);                 // wide, signed
    case 3: return format_number(std::pow(10.0, u(rng) * 300.0 - 150.0));  // extreme magnitudes
    case 4: return format_number(std::exp(u(rng) * 8.0));               // skewed
    default: return "4";                                                // constant
  }
}

// Fully present table with numeric, categorical and boolean columns; a
// target column "t" when `with_target`.
inline Table random_table(std::mt19937_64& rng, bool with_target) {
  const std::size_t rows = 5 + pick(rng, 120);
  const std::size_t cols = 1 + pick(rng, 7);
  std::string text;
  std::vector<int> kinds;
  for (std::size_t c = 0; c < cols; ++c) {
    if (c) text += ',';
    text += "c" + std::to_string(c);
    kinds.push_back(static_cast<int>(pick(rng, 9)));
  }
  if (with_target) text += ",t";
  text += '\n';
  static const char* cats[] = {"red", "green", "blue", "teal"};
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) text += ',';
      if (kinds[c] < 6) text += number_cell(rng, kinds[c]);
      else if (kinds[c] < 8) text += cats[pick(rng, 4)];
      else text += chance(rng, 0.5) ? "true" : "false";
    }
    if (with_target) text += "," + format_number(std::round(std::uniform_real_distribution<double>(0, 3)(rng)));
    text += '\n';
  }
  Table t = parse_csv(text);
  return with_target ? t.with_target("t") : t;
}

// A plan of 1..max_len actions over the table's names, the target, unknown
// names and columns created earlier in the plan.
inline Plan random_plan(std::mt19937_64& rng, const Table& table, std::size_t max_len = 8) {
  std::vector<std::string> pool = table.names();
  pool.push_back("ghost");
  std::vector<std::string> numeric;
  for (std::size_t c = 0; c < table.n_cols(); ++c)
    if (table.column(c).kind == ColumnKind::Numeric && !table.is_target(table.column(c).name))
      numeric.push_back(table.column(c).name);
  std::size_t fresh = 0;
  // Mostly plausible numeric operands, sometimes anything at all.
  auto any = [&] {
    if (!numeric.empty() && chance(rng, 0.75)) return numeric[pick(rng, numeric.size())];
    return pool[pick(rng, pool.size())];
  };
  auto out_name = [&](bool is_numeric) {
    std::string n = chance(rng, 0.03) ? pool[pick(rng, pool.size())] : "n" + std::to_string(fresh++);
    pool.push_back(n);
    if (is_numeric) numeric.push_back(n);
    return n;
  };
  Plan plan;
  plan.origin = PlanOrigin::Replay;
  const std::size_t len = 1 + std::min(pick(rng, max_len), pick(rng, max_len));
  for (std::size_t i = 0; i < len; ++i) {
    switch (pick(rng, 10)) {
      case 0: {
        SelectDrop a;
        const std::size_t n = 1 + pick(rng, 3);
        for (std::size_t j = 0; j < n; ++j) a.columns.push_back(any());
        plan.actions.push_back(a);
        break;
      }
      case 1:
        plan.actions.push_back(SelectKeepTopK{pick(rng, table.n_cols() + 2),
                                              chance(rng, 0.5) ? KeepCriterion::Variance : KeepCriterion::TargetCorrelation});
        break;
      case 2:
      case 3:
      case 4: {
        TransformUnary a;
        a.op = static_cast<UnaryOp>(pick(rng, 7));
        a.column = any();
        if (a.op == UnaryOp::BinEqualWidth) a.bins = pick(rng, 12);
        a.out_name = out_name(a.op != UnaryOp::BinEqualWidth);
        plan.actions.push_back(a);
        break;
      }
      case 5:
      case 6:
      case 7: {
        TransformBinary a;
        a.op = static_cast<BinaryOp>(pick(rng, 4));
        a.left = any();
        a.right = any();
        a.out_name = out_name(true);
        plan.actions.push_back(a);
        break;
      }
      case 8: {
        GeneratePolynomial a;
        const std::size_t n = 1 + pick(rng, 3);
        for (std::size_t j = 0; j < n; ++j) a.columns.push_back(any());
        a.out_prefix = "p" + std::to_string(fresh++);
        plan.actions.push_back(a);
        for (const auto& name : polynomial_output_names(a)) {
          pool.push_back(name);
          numeric.push_back(name);
        }
        break;
      }
      default: {
        GenerateGroupAgg a;
        a.group_by = pool[pick(rng, pool.size())];
        a.agg = static_cast<AggOp>(pick(rng, 4));
        a.value = any();
        a.out_name = out_name(true);
        plan.actions.push_back(a);
        break;
      }
    }
  }
  return plan;
}

}  // namespace forge::fuzz
