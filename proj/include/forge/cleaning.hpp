#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forge/table.hpp"

namespace forge {

enum class CleaningMode { Light, Aggressive, TimeSeries };

std::string_view to_string(CleaningMode mode);
std::optional<CleaningMode> parse_cleaning_mode(std::string_view text);

struct CleaningStep {
  std::string name;
  std::vector<std::string> columns;  // columns affected
  std::size_t cells_changed = 0;
};

struct CleaningReport {
  std::vector<CleaningStep> steps;
  std::vector<std::string> columns_dropped;
  std::size_t rows_dropped = 0;
};

struct CleaningResult {
  Table table;
  CleaningReport report;
};

// Standardizes a raw table.
//
//   Light       trim_whitespace, reinfer_kinds, drop_all_missing_columns,
//               drop_missing_target_rows, impute (median / lexicographic mode).
//   Aggressive  Light plus drop_sparse_columns (missing rate > 0.5) before
//               imputation, then winsorize (1st/99th percentile),
//               drop_constant_columns and drop_duplicate_rows, repeated until
//               none of the three changes anything.
//   TimeSeries  Light with impute replaced by sort_by_time, forward_fill and
//               back_fill.
//
// The target column is never trimmed, re-typed, imputed or dropped; rows with
// a missing target are removed. Throws CleaningError when TimeSeries lacks a
// usable time column, or when no rows or no feature columns remain.
CleaningResult clean(const Table& table, CleaningMode mode,
                     const std::optional<std::string>& time_column = std::nullopt,
                     const MissingTokens& missing = {});

// Linear-interpolation percentile on the sorted values, h = p * (n - 1).
// Throws std::invalid_argument on an empty sequence or p outside [0, 1].
double percentile(std::span<const double> values, double p);

}  // namespace forge
