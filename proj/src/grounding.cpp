#include "forge/grounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace forge {

namespace {

// |z| <= (n - 1) / sqrt(n) for sample z-scores, which stays below this bound
// for any table under 10^12 rows.
constexpr double kZscoreBound = 1e6;
constexpr double kMaxRows = 1e12;

// Value range of a column's present cells. min_abs is a lower bound on |x|;
// zero means the column may contain zeros.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double min_abs = 0.0;
  bool empty = true;  // no present cells
};

Range from_interval(double lo, double hi) {
  Range r;
  r.lo = lo;
  r.hi = hi;
  r.min_abs = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
  r.empty = false;
  return r;
}

double max_abs(const Range& r) { return std::max(std::abs(r.lo), std::abs(r.hi)); }

bool bounded(const Range& r) {
  if (r.empty) return true;
  return std::isfinite(r.lo) && std::isfinite(r.hi) && std::isfinite(r.min_abs) &&
         max_abs(r) <= kMaxMagnitude;
}

struct Entry {
  std::string name;
  ColumnKind kind = ColumnKind::Text;
  bool is_target = false;
  bool derived = false;  // created earlier in the plan being grounded
  Range range;
  std::optional<double> target_correlation;
  std::optional<double> stddev;
};

class Schema {
 public:
  Schema(std::span<const ColumnProfile> profiles, const std::optional<std::string>& target) {
    for (const auto& p : profiles) {
      Entry e;
      e.name = p.name;
      e.kind = p.kind;
      e.is_target = (target && *target == p.name) || p.is_target;
      if (p.kind == ColumnKind::Numeric && p.min && p.max) {
        e.range.lo = *p.min;
        e.range.hi = *p.max;
        e.range.min_abs = p.min_abs;
        e.range.empty = false;
      }
      e.target_correlation = p.target_correlation;
      e.stddev = p.stddev;
      entries_.push_back(std::move(e));
    }
    has_target_ = std::any_of(entries_.begin(), entries_.end(), [](const Entry& e) { return e.is_target; });
  }

  const Entry* find(std::string_view name) const {
    for (const auto& e : entries_)
      if (e.name == name) return &e;
    return nullptr;
  }
  bool has_target() const { return has_target_; }
  std::vector<Entry>& entries() { return entries_; }
  std::size_t n_features() const {
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [](const Entry& e) { return !e.is_target; }));
  }

  void add(std::string name, ColumnKind kind, Range range) {
    Entry e;
    e.name = std::move(name);
    e.kind = kind;
    e.derived = true;
    e.range = range;
    entries_.push_back(std::move(e));
  }

  std::vector<SchemaEntry> snapshot() const {
    std::vector<SchemaEntry> out;
    for (const auto& e : entries_) out.push_back({e.name, e.kind});
    return out;
  }

 private:
  std::vector<Entry> entries_;
  bool has_target_ = false;
};

std::string quote_name(std::string_view name) { return "'" + std::string(name) + "'"; }

// Each check returns a failing verdict or nullopt.
using Check = std::optional<Verdict>;

Check exists(const Schema& s, std::string_view name) {
  if (!s.find(name)) return Verdict::fail(GroundingCode::G1, "column " + quote_name(name) + " does not exist");
  return std::nullopt;
}

Check numeric(const Schema& s, std::string_view name, std::string_view op) {
  const Entry* e = s.find(name);
  if (e->kind != ColumnKind::Numeric)
    return Verdict::fail(GroundingCode::G2, std::string(op) + " requires a numeric column; " + quote_name(name) +
                                                " is " + std::string(to_string(e->kind)));
  return std::nullopt;
}

Check new_name(const Schema& s, std::string_view name) {
  if (name.empty()) return Verdict::fail(GroundingCode::G5, "output name is empty");
  if (s.find(name)) return Verdict::fail(GroundingCode::G5, "output name " + quote_name(name) + " already exists");
  return std::nullopt;
}

Check not_target(const Schema& s, std::string_view name) {
  if (s.find(name)->is_target)
    return Verdict::fail(GroundingCode::G6, "target column " + quote_name(name) + " cannot be used as an operand");
  return std::nullopt;
}

Check within_bounds(const Range& r, std::string_view what) {
  if (!bounded(r))
    return Verdict::fail(GroundingCode::G4, "predicted magnitude of " + std::string(what) + " exceeds 1e300");
  return std::nullopt;
}

#define FORGE_CHECK(expr)            \
  do {                               \
    if (auto failed__ = (expr)) {    \
      return std::move(*failed__);   \
    }                                \
  } while (false)

Range unary_range(UnaryOp op, const Range& x) {
  if (x.empty) return x;
  switch (op) {
    case UnaryOp::Log1p: return from_interval(std::log1p(x.lo), std::log1p(x.hi));
    case UnaryOp::Sqrt: {
      Range r = from_interval(std::sqrt(x.lo), std::sqrt(x.hi));
      r.min_abs = std::sqrt(x.min_abs);
      return r;
    }
    case UnaryOp::Square: {
      const double m = max_abs(x);
      Range r = from_interval(x.min_abs * x.min_abs, m * m);
      r.min_abs = x.min_abs * x.min_abs;
      return r;
    }
    case UnaryOp::Reciprocal: {
      if (x.lo > 0.0 || x.hi < 0.0) return from_interval(1.0 / x.hi, 1.0 / x.lo);
      const double m = 1.0 / x.min_abs;
      Range r = from_interval(-m, m);
      r.min_abs = 1.0 / max_abs(x);
      return r;
    }
    case UnaryOp::Zscore: return from_interval(-kZscoreBound, kZscoreBound);
    case UnaryOp::Minmax: return from_interval(0.0, 1.0);
    case UnaryOp::BinEqualWidth: return {};
  }
  return {};
}

Range binary_range(BinaryOp op, const Range& a, const Range& b) {
  if (a.empty || b.empty) return {};
  switch (op) {
    case BinaryOp::Add: return from_interval(a.lo + b.lo, a.hi + b.hi);
    case BinaryOp::Sub: return from_interval(a.lo - b.hi, a.hi - b.lo);
    case BinaryOp::Mul: {
      const double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
      Range r = from_interval(*std::min_element(p, p + 4), *std::max_element(p, p + 4));
      r.min_abs = std::max(r.min_abs, a.min_abs * b.min_abs);
      return r;
    }
    case BinaryOp::Div: {
      const double m = max_abs(a) / b.min_abs;
      Range r = from_interval(-m, m);
      r.min_abs = a.min_abs / max_abs(b);
      return r;
    }
  }
  return {};
}

Verdict check_drop(Schema& s, const SelectDrop& a) {
  for (const auto& c : a.columns) FORGE_CHECK(exists(s, c));
  if (a.columns.empty()) return Verdict::fail(GroundingCode::G4, "select_drop needs at least one column");
  for (const auto& c : a.columns) FORGE_CHECK(not_target(s, c));
  const std::set<std::string> dropped(a.columns.begin(), a.columns.end());
  if (s.n_features() <= dropped.size())
    return Verdict::fail(GroundingCode::G7, "selection would leave no feature columns");
  auto& entries = s.entries();
  std::erase_if(entries, [&](const Entry& e) { return dropped.contains(e.name); });
  return Verdict::ok();
}

Verdict check_keep(Schema& s, const SelectKeepTopK& a) {
  if (a.criterion == KeepCriterion::TargetCorrelation && !s.has_target())
    return Verdict::fail(GroundingCode::G1, "target column does not exist; cannot rank by target correlation");
  std::vector<const Entry*> candidates;
  std::size_t others = 0;
  for (const auto& e : s.entries()) {
    if (e.is_target) continue;
    if (e.kind != ColumnKind::Numeric) {
      ++others;
      continue;
    }
    candidates.push_back(&e);
  }
  for (const Entry* e : candidates)
    if (e->derived)
      return Verdict::fail(GroundingCode::G4, "ranking statistics are unknown for " + quote_name(e->name) +
                                                  ", created earlier in this plan");
  if (a.k == 0) return Verdict::fail(GroundingCode::G7, "select_keep_top_k with k = 0 leaves no feature columns");
  if (candidates.empty() && others == 0)
    return Verdict::fail(GroundingCode::G7, "selection would leave no feature columns");

  std::vector<double> scores;
  for (const Entry* e : candidates) {
    if (a.criterion == KeepCriterion::TargetCorrelation) {
      scores.push_back(e->target_correlation ? std::abs(*e->target_correlation) : 0.0);
    } else {
      scores.push_back(e->stddev.value_or(0.0));
    }
  }
  const auto order = rank_for_keep(scores);
  std::set<std::string> keep;
  for (std::size_t i = 0; i < order.size() && i < a.k; ++i) keep.insert(candidates[order[i]]->name);
  std::erase_if(s.entries(), [&](const Entry& e) {
    return !e.is_target && e.kind == ColumnKind::Numeric && !keep.contains(e.name);
  });
  return Verdict::ok();
}

Verdict check_unary(Schema& s, const TransformUnary& a) {
  const auto op = std::string(to_string(a.op));
  FORGE_CHECK(exists(s, a.column));
  FORGE_CHECK(numeric(s, a.column, op));
  const Range& x = s.find(a.column)->range;
  const std::string sig = action_signature(a);
  if (a.op == UnaryOp::Reciprocal && !x.empty && x.min_abs == 0.0)
    return Verdict::fail(GroundingCode::G3, "division by zero in " + sig);
  if (a.op == UnaryOp::Log1p && !x.empty && x.lo < -1.0 + kLog1pMargin)
    return Verdict::fail(GroundingCode::G4, "log1p domain violated: min(" + a.column + ") = " +
                                                format_number(x.lo) + " <= -1");
  if (a.op == UnaryOp::Sqrt && !x.empty && x.lo < 0.0)
    return Verdict::fail(GroundingCode::G4,
                         "sqrt domain violated: min(" + a.column + ") = " + format_number(x.lo) + " < 0");
  if (a.op == UnaryOp::BinEqualWidth && (a.bins < 1 || a.bins > kMaxBins))
    return Verdict::fail(GroundingCode::G4, "bin count must be between 1 and " + std::to_string(kMaxBins));
  const Range out = unary_range(a.op, x);
  FORGE_CHECK(within_bounds(out, sig));
  FORGE_CHECK(new_name(s, a.out_name));
  FORGE_CHECK(not_target(s, a.column));
  s.add(a.out_name, a.op == UnaryOp::BinEqualWidth ? ColumnKind::Categorical : ColumnKind::Numeric, out);
  return Verdict::ok();
}

Verdict check_binary(Schema& s, const TransformBinary& a) {
  const auto op = std::string(to_string(a.op));
  FORGE_CHECK(exists(s, a.left));
  FORGE_CHECK(exists(s, a.right));
  FORGE_CHECK(numeric(s, a.left, op));
  FORGE_CHECK(numeric(s, a.right, op));
  const Range& l = s.find(a.left)->range;
  const Range& r = s.find(a.right)->range;
  const std::string sig = action_signature(a);
  if (a.op == BinaryOp::Div && !r.empty && r.min_abs == 0.0)
    return Verdict::fail(GroundingCode::G3, "division by zero in " + sig);
  const Range out = binary_range(a.op, l, r);
  FORGE_CHECK(within_bounds(out, sig));
  FORGE_CHECK(new_name(s, a.out_name));
  FORGE_CHECK(not_target(s, a.left));
  FORGE_CHECK(not_target(s, a.right));
  s.add(a.out_name, ColumnKind::Numeric, out);
  return Verdict::ok();
}

Verdict check_polynomial(Schema& s, const GeneratePolynomial& a) {
  for (const auto& c : a.columns) FORGE_CHECK(exists(s, c));
  for (const auto& c : a.columns) FORGE_CHECK(numeric(s, c, "generate_polynomial"));
  if (a.degree != 2) return Verdict::fail(GroundingCode::G4, "only degree-2 polynomials are supported");
  if (a.columns.empty()) return Verdict::fail(GroundingCode::G4, "generate_polynomial needs at least one column");
  if (a.columns.size() > kMaxPolynomialColumns)
    return Verdict::fail(GroundingCode::G4,
                         "generate_polynomial accepts at most " + std::to_string(kMaxPolynomialColumns) + " columns");
  if (std::set<std::string>(a.columns.begin(), a.columns.end()).size() != a.columns.size())
    return Verdict::fail(GroundingCode::G4, "generate_polynomial columns must be distinct");
  std::vector<Range> outs;
  for (std::size_t i = 0; i < a.columns.size(); ++i)
    for (std::size_t j = i; j < a.columns.size(); ++j) {
      const Range& x = s.find(a.columns[i])->range;
      const Range& y = s.find(a.columns[j])->range;
      const Range out = i == j ? unary_range(UnaryOp::Square, x) : binary_range(BinaryOp::Mul, x, y);
      FORGE_CHECK(within_bounds(out, a.columns[i] + " * " + a.columns[j]));
      outs.push_back(out);
    }
  if (a.out_prefix.empty()) return Verdict::fail(GroundingCode::G5, "output prefix is empty");
  const auto names = polynomial_output_names(a);
  std::set<std::string> fresh;
  for (const auto& n : names) {
    FORGE_CHECK(new_name(s, n));
    if (!fresh.insert(n).second)
      return Verdict::fail(GroundingCode::G5, "output name " + quote_name(n) + " generated twice");
  }
  for (const auto& c : a.columns) FORGE_CHECK(not_target(s, c));
  for (std::size_t i = 0; i < names.size(); ++i) s.add(names[i], ColumnKind::Numeric, outs[i]);
  return Verdict::ok();
}

Verdict check_group_agg(Schema& s, const GenerateGroupAgg& a) {
  FORGE_CHECK(exists(s, a.group_by));
  FORGE_CHECK(exists(s, a.value));
  const Entry* g = s.find(a.group_by);
  if (g->kind != ColumnKind::Categorical)
    return Verdict::fail(GroundingCode::G2, "generate_group_agg requires a categorical group key; " +
                                                quote_name(a.group_by) + " is " + std::string(to_string(g->kind)));
  FORGE_CHECK(numeric(s, a.value, "generate_group_agg"));
  const Range& v = s.find(a.value)->range;
  Range out;
  if (a.agg == AggOp::Count) {
    out = from_interval(1.0, kMaxRows);
  } else if (!v.empty) {
    out = from_interval(v.lo, v.hi);
    if (a.agg != AggOp::Mean) out.min_abs = v.min_abs;
  }
  FORGE_CHECK(within_bounds(out, action_signature(a)));
  FORGE_CHECK(new_name(s, a.out_name));
  FORGE_CHECK(not_target(s, a.group_by));
  FORGE_CHECK(not_target(s, a.value));
  s.add(a.out_name, ColumnKind::Numeric, out);
  return Verdict::ok();
}

#undef FORGE_CHECK

}  // namespace

std::string_view to_string(GroundingCode code) {
  switch (code) {
    case GroundingCode::G1: return "G1";
    case GroundingCode::G2: return "G2";
    case GroundingCode::G3: return "G3";
    case GroundingCode::G4: return "G4";
    case GroundingCode::G5: return "G5";
    case GroundingCode::G6: return "G6";
    case GroundingCode::G7: return "G7";
  }
  return "G?";
}

std::size_t GroundingReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return !v.pass; }));
}

std::vector<std::size_t> rank_for_keep(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

GroundingReport ground_plan(const Plan& plan, std::span<const ColumnProfile> schema,
                            const std::optional<std::string>& target) {
  Schema s(schema, target);
  GroundingReport report;
  for (const auto& action : plan.actions) {
    Verdict v = std::visit(
        [&s](const auto& a) -> Verdict {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, SelectDrop>) {
            return check_drop(s, a);
          } else if constexpr (std::is_same_v<T, SelectKeepTopK>) {
            return check_keep(s, a);
          } else if constexpr (std::is_same_v<T, TransformUnary>) {
            return check_unary(s, a);
          } else if constexpr (std::is_same_v<T, TransformBinary>) {
            return check_binary(s, a);
          } else if constexpr (std::is_same_v<T, GeneratePolynomial>) {
            return check_polynomial(s, a);
          } else {
            return check_group_agg(s, a);
          }
        },
        action);
    report.verdicts.push_back(std::move(v));
  }
  report.plan_admissible = report.failures() == 0;
  report.predicted_schema = s.snapshot();
  return report;
}

}  // namespace forge
