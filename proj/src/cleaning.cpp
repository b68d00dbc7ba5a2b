#include "forge/cleaning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "forge/errors.hpp"

namespace forge {

namespace {

bool is_string_kind(ColumnKind k) { return k == ColumnKind::Categorical || k == ColumnKind::Text; }

class Workbench {
 public:
  Workbench(const Table& t, const MissingTokens& missing) : missing_(missing) {
    for (std::size_t c = 0; c < t.n_cols(); ++c) columns_.push_back(t.column(c));
    target_ = t.target();
    provenance_ = t.provenance();
  }

  std::vector<Column>& columns() { return columns_; }
  bool is_target(const Column& c) const { return target_ && *target_ == c.name; }
  std::size_t n_rows() const { return columns_.empty() ? 0 : columns_.front().size(); }
  std::size_t n_features() const {
    std::size_t n = 0;
    for (const auto& c : columns_) n += is_target(c) ? 0 : 1;
    return n;
  }

  CleaningStep trim_whitespace() {
    CleaningStep step{"trim_whitespace", {}, 0};
    for (auto& col : columns_) {
      if (is_target(col) || !col.has_labels()) continue;
      std::size_t changed = 0;
      for (std::size_t i = 0; i < col.size(); ++i) {
        if (col.is_missing(i)) continue;
        const auto t = trim(col.labels[i]);
        if (t.size() != col.labels[i].size()) {
          col.labels[i] = std::string(t);
          ++changed;
        }
      }
      if (changed) {
        step.columns.push_back(col.name);
        step.cells_changed += changed;
      }
    }
    return step;
  }

  CleaningStep reinfer_kinds() {
    CleaningStep step{"reinfer_kinds", {}, 0};
    for (auto& col : columns_) {
      if (is_target(col) || !col.has_labels()) continue;
      ColumnKind kind = infer_kind(col.labels, col.missing, missing_);
      // Categorical and Text differ only by cardinality, which shifts as rows
      // are dropped; the first decision sticks.
      if (is_string_kind(kind) && is_string_kind(col.kind)) kind = col.kind;
      const std::size_t before = col.missing_count();
      Column rebuilt = build_column(col.name, col.labels, col.missing, kind, missing_);
      const std::size_t lost = rebuilt.missing_count() - before;
      if (kind != col.kind || lost > 0) {
        step.columns.push_back(col.name);
        step.cells_changed += lost;
      }
      col = std::move(rebuilt);
    }
    return step;
  }

  CleaningStep drop_missing_target_rows(CleaningReport& report) {
    CleaningStep step{"drop_missing_target_rows", {}, 0};
    if (!target_) return step;
    const Column* target = nullptr;
    for (const auto& c : columns_)
      if (is_target(c)) target = &c;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < target->size(); ++i)
      if (!target->is_missing(i)) keep.push_back(i);
    const std::size_t dropped = n_rows() - keep.size();
    if (dropped) {
      step.columns.push_back(*target_);
      step.cells_changed = dropped;
      report.rows_dropped += dropped;
      take_rows(keep);
    }
    return step;
  }

  template <typename Pred>
  CleaningStep drop_columns(std::string name, CleaningReport& report, Pred pred) {
    CleaningStep step{std::move(name), {}, 0};
    std::vector<Column> kept;
    for (auto& col : columns_) {
      if (!is_target(col) && pred(col)) {
        step.columns.push_back(col.name);
        step.cells_changed += col.size();
        report.columns_dropped.push_back(col.name);
      } else {
        kept.push_back(std::move(col));
      }
    }
    columns_ = std::move(kept);
    return step;
  }

  CleaningStep impute() {
    CleaningStep step{"impute", {}, 0};
    for (auto& col : columns_) {
      if (is_target(col)) continue;
      const std::size_t n_missing = col.missing_count();
      if (n_missing == 0 || n_missing == col.size()) continue;
      if (col.kind == ColumnKind::Numeric || col.kind == ColumnKind::Datetime) {
        std::vector<double> present;
        for (std::size_t i = 0; i < col.size(); ++i)
          if (!col.is_missing(i)) present.push_back(col.values[i]);
        const double median = percentile(present, 0.5);
        const std::string label =
            col.kind == ColumnKind::Datetime ? format_datetime(median) : std::string{};
        for (std::size_t i = 0; i < col.size(); ++i) {
          if (!col.is_missing(i)) continue;
          col.values[i] = median;
          if (col.has_labels()) col.labels[i] = label;
          col.missing[i] = 0;
        }
      } else {
        std::map<std::string, std::size_t> counts;
        for (std::size_t i = 0; i < col.size(); ++i)
          if (!col.is_missing(i)) ++counts[col.labels[i]];
        // std::map iterates lexicographically, so strict > keeps the smallest tie.
        const std::string* mode = nullptr;
        std::size_t best = 0;
        for (const auto& [label, count] : counts)
          if (count > best) {
            best = count;
            mode = &label;
          }
        const double value = col.kind == ColumnKind::Boolean ? (*parse_bool(*mode) ? 1.0 : 0.0) : 0.0;
        for (std::size_t i = 0; i < col.size(); ++i) {
          if (!col.is_missing(i)) continue;
          col.labels[i] = *mode;
          if (col.has_values()) col.values[i] = value;
          col.missing[i] = 0;
        }
      }
      step.columns.push_back(col.name);
      step.cells_changed += n_missing;
    }
    return step;
  }

  CleaningStep sort_by_time(const std::string& time_column) {
    CleaningStep step{"sort_by_time", {time_column}, 0};
    const Column* tc = nullptr;
    for (const auto& c : columns_)
      if (c.name == time_column) tc = &c;
    std::vector<std::size_t> order(n_rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [tc](std::size_t a, std::size_t b) {
      const bool ma = tc->is_missing(a), mb = tc->is_missing(b);
      if (ma != mb) return mb;
      if (ma) return false;
      return tc->values[a] < tc->values[b];
    });
    for (std::size_t i = 0; i < order.size(); ++i)
      if (order[i] != i) ++step.cells_changed;
    take_rows(order);
    return step;
  }

  // Forward (or backward) fill of every feature column.
  CleaningStep fill(bool forward) {
    CleaningStep step{forward ? "forward_fill" : "back_fill", {}, 0};
    const std::size_t n = n_rows();
    for (auto& col : columns_) {
      if (is_target(col)) continue;
      std::size_t changed = 0;
      std::optional<std::size_t> source;
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = forward ? k : n - 1 - k;
        if (!col.is_missing(i)) {
          source = i;
          continue;
        }
        if (!source) continue;
        if (col.has_values()) col.values[i] = col.values[*source];
        if (col.has_labels()) col.labels[i] = col.labels[*source];
        col.missing[i] = 0;
        ++changed;
      }
      if (changed) {
        step.columns.push_back(col.name);
        step.cells_changed += changed;
      }
    }
    return step;
  }

  // Clips at the order statistics that bracket the 1st and 99th percentiles
  // from outside, which makes a second pass a no-op.
  std::size_t winsorize(std::set<std::string>& touched) {
    std::size_t changed = 0;
    const std::size_t n = n_rows();
    if (n < 2) return 0;
    const std::size_t lo_idx = (n - 1) / 100;
    const std::size_t hi_idx = (99 * (n - 1) + 99) / 100;
    for (auto& col : columns_) {
      if (is_target(col) || col.kind != ColumnKind::Numeric) continue;
      std::vector<double> sorted;
      for (std::size_t i = 0; i < n; ++i)
        if (!col.is_missing(i)) sorted.push_back(col.values[i]);
      if (sorted.size() < 2) continue;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t m = sorted.size();
      const double lo = sorted[std::min(lo_idx, m - 1)];
      const double hi = sorted[std::min(hi_idx, m - 1)];
      for (std::size_t i = 0; i < n; ++i) {
        if (col.is_missing(i)) continue;
        const double clipped = std::clamp(col.values[i], lo, hi);
        if (clipped != col.values[i]) {
          col.values[i] = clipped;
          ++changed;
          touched.insert(col.name);
        }
      }
    }
    return changed;
  }

  std::size_t drop_duplicate_rows() {
    const std::size_t n = n_rows();
    std::unordered_set<std::string> seen;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < n; ++i) {
      std::string key;
      for (const auto& col : columns_) {
        if (col.is_missing(i)) {
          key += '\x1e';
        } else {
          key += col.cell_text(i);
        }
        key += '\x1f';
      }
      if (seen.insert(std::move(key)).second) keep.push_back(i);
    }
    const std::size_t dropped = n - keep.size();
    if (dropped) take_rows(keep);
    return dropped;
  }

  void take_rows(std::span<const std::size_t> rows) {
    Table t(std::move(columns_));
    t = t.take_rows(rows);
    columns_.clear();
    for (std::size_t c = 0; c < t.n_cols(); ++c) columns_.push_back(t.column(c));
  }

  Table finish(std::string descriptor) {
    auto provenance = provenance_;
    provenance.push_back(std::move(descriptor));
    return Table(std::move(columns_), target_, std::move(provenance));
  }

 private:
  std::vector<Column> columns_;
  std::optional<std::string> target_;
  std::vector<std::string> provenance_;
  const MissingTokens& missing_;
};

std::size_t distinct_count(const Column& col) {
  if (col.has_values()) {
    std::set<double> d;
    for (std::size_t i = 0; i < col.size(); ++i)
      if (!col.is_missing(i)) d.insert(col.values[i]);
    return d.size();
  }
  std::set<std::string_view> d;
  for (std::size_t i = 0; i < col.size(); ++i)
    if (!col.is_missing(i)) d.insert(col.labels[i]);
  return d.size();
}

}  // namespace

std::string_view to_string(CleaningMode mode) {
  switch (mode) {
    case CleaningMode::Light: return "light";
    case CleaningMode::Aggressive: return "aggressive";
    case CleaningMode::TimeSeries: return "timeseries";
  }
  return "light";
}

std::optional<CleaningMode> parse_cleaning_mode(std::string_view text) {
  if (text == "light") return CleaningMode::Light;
  if (text == "aggressive") return CleaningMode::Aggressive;
  if (text == "timeseries" || text == "time-series") return CleaningMode::TimeSeries;
  return std::nullopt;
}

double percentile(std::span<const double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty sequence");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("percentile fraction outside [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

CleaningResult clean(const Table& table, CleaningMode mode,
                     const std::optional<std::string>& time_column, const MissingTokens& missing) {
  if (table.empty()) throw CleaningError("cannot clean an empty table");
  if (mode == CleaningMode::TimeSeries && !time_column)
    throw CleaningError("timeseries cleaning requires a time column");

  Workbench wb(table, missing);
  CleaningReport report;
  auto add = [&report](CleaningStep step) { report.steps.push_back(std::move(step)); };

  add(wb.trim_whitespace());
  add(wb.reinfer_kinds());
  add(wb.drop_missing_target_rows(report));
  if (wb.n_rows() == 0) throw CleaningError("no rows remain after dropping rows with a missing target");
  add(wb.drop_columns("drop_all_missing_columns", report,
                      [](const Column& c) { return c.missing_count() == c.size(); }));

  if (mode == CleaningMode::Aggressive)
    add(wb.drop_columns("drop_sparse_columns", report, [](const Column& c) {
      return static_cast<double>(c.missing_count()) > 0.5 * static_cast<double>(c.size());
    }));

  if (mode == CleaningMode::TimeSeries) {
    const Column* tc = nullptr;
    for (const auto& c : wb.columns())
      if (c.name == *time_column) tc = &c;
    if (!tc) throw CleaningError("time column '" + *time_column + "' not found");
    if (wb.is_target(*tc)) throw CleaningError("time column cannot be the target");
    if (tc->kind != ColumnKind::Datetime && tc->kind != ColumnKind::Numeric)
      throw CleaningError("time column '" + *time_column + "' is " + std::string(to_string(tc->kind)) +
                          ", expected datetime or numeric");
    add(wb.sort_by_time(*time_column));
    add(wb.fill(true));
    add(wb.fill(false));
  } else {
    add(wb.impute());
  }

  if (mode == CleaningMode::Aggressive) {
    CleaningStep wins{"winsorize", {}, 0};
    CleaningStep constant{"drop_constant_columns", {}, 0};
    CleaningStep dups{"drop_duplicate_rows", {}, 0};
    std::set<std::string> touched;
    for (int round = 0; round < 32; ++round) {
      const std::size_t clipped = wb.winsorize(touched);
      const auto dropped = wb.drop_columns("drop_constant_columns", report,
                                           [](const Column& c) { return distinct_count(c) <= 1; });
      const std::size_t dup_rows = wb.drop_duplicate_rows();
      wins.cells_changed += clipped;
      constant.cells_changed += dropped.cells_changed;
      constant.columns.insert(constant.columns.end(), dropped.columns.begin(), dropped.columns.end());
      dups.cells_changed += dup_rows;
      report.rows_dropped += dup_rows;
      if (clipped == 0 && dropped.columns.empty() && dup_rows == 0) break;
    }
    wins.columns.assign(touched.begin(), touched.end());
    add(std::move(wins));
    add(std::move(constant));
    add(std::move(dups));
  }

  if (wb.n_features() == 0) throw CleaningError("no feature columns remain after cleaning");
  Table out = wb.finish("clean:" + std::string(to_string(mode)));
  return {std::move(out), std::move(report)};
}

}  // namespace forge
