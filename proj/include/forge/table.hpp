#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

enum class ColumnKind { Numeric, Categorical, Boolean, Datetime, Text };

std::string_view to_string(ColumnKind kind);

// One typed column. Numeric, Boolean (0/1) and Datetime (epoch seconds)
// columns carry `values`; every kind except Numeric carries the original cell
// text in `labels`, so Boolean and Datetime cells round-trip verbatim.
// Missing cells are flagged in `missing` and hold NaN / "" in the payloads.
struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Text;
  std::vector<double> values;
  std::vector<std::string> labels;
  std::vector<std::uint8_t> missing;

  std::size_t size() const { return missing.size(); }
  bool is_missing(std::size_t row) const { return missing[row] != 0; }
  std::size_t missing_count() const;

  bool has_values() const { return kind != ColumnKind::Categorical && kind != ColumnKind::Text; }
  bool has_labels() const { return kind != ColumnKind::Numeric; }

  // Cell rendered as text: labels verbatim, numbers in shortest round-trip
  // form, "" for missing cells.
  std::string cell_text(std::size_t row) const;

  static Column numeric(std::string name, std::vector<double> values,
                        std::vector<std::uint8_t> missing = {});
  static Column categorical(std::string name, std::vector<std::string> labels,
                            std::vector<std::uint8_t> missing = {});
  static Column text(std::string name, std::vector<std::string> labels,
                     std::vector<std::uint8_t> missing = {});

  // Checks payload lengths against `missing` for the column's kind.
  void check_shape() const;

  // Equal names, kinds, missing flags and non-missing payloads.
  friend bool operator==(const Column& a, const Column& b);
};

// Immutable columnar table. Every "mutation" returns a new Table; columns are
// shared between tables until replaced.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<Column> columns, std::optional<std::string> target = std::nullopt,
                 std::vector<std::string> provenance = {});

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return columns_.size(); }
  bool empty() const { return columns_.empty() || n_rows_ == 0; }

  const Column& column(std::size_t i) const { return *columns_.at(i); }
  const Column& column(std::string_view name) const;
  const Column* find(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::vector<std::string> names() const;

  const std::optional<std::string>& target() const { return target_; }
  bool is_target(std::string_view name) const { return target_ && *target_ == name; }
  std::vector<std::size_t> feature_indices() const;
  std::size_t n_features() const;

  const std::vector<std::string>& provenance() const { return provenance_; }

  Table with_target(std::optional<std::string> target) const;
  Table with_column(Column column) const;
  Table with_replaced(std::size_t index, Column column) const;
  Table without(std::span<const std::string> names) const;
  Table take_rows(std::span<const std::size_t> rows) const;
  Table with_provenance(std::string descriptor) const;

  // Equal columns and target; provenance is ignored.
  bool same_values(const Table& other) const;

 private:
  Table(std::vector<std::shared_ptr<const Column>> columns, std::optional<std::string> target,
        std::vector<std::string> provenance);
  void validate();

  std::vector<std::shared_ptr<const Column>> columns_;
  std::size_t n_rows_ = 0;
  std::optional<std::string> target_;
  std::vector<std::string> provenance_;
};

// --- cell parsing and kind inference -------------------------------------

struct MissingTokens {
  std::vector<std::string> tokens{"", "NA", "N/A", "null", "NaN"};
  // Matches after trimming surrounding whitespace.
  bool matches(std::string_view cell) const;
};

std::string_view trim(std::string_view s);

std::optional<double> parse_number(std::string_view cell);
std::optional<bool> parse_bool(std::string_view cell);
// ISO-8601 date or date-time, returned as seconds since the Unix epoch.
std::optional<double> parse_datetime(std::string_view cell);

std::string format_number(double value);
std::string format_datetime(double epoch_seconds);

// Kind inference over raw cells. Rules, first match wins, over the
// non-missing cells: Numeric (>= 99% parse), Boolean (value set within
// true/false/0/1/yes/no), Datetime (>= 99% parse), Categorical
// (n_distinct <= max(20, 5% of n)), Text. All-missing input is Text.
ColumnKind infer_kind(std::span<const std::string> raw, const MissingTokens& missing = {});
// Same, with cells whose mask entry is non-zero also treated as missing.
ColumnKind infer_kind(std::span<const std::string> raw, std::span<const std::uint8_t> mask,
                      const MissingTokens& missing = {});

// Builds a typed column from raw cells. Cells that match a missing token, or
// fail to parse under the inferred kind, are flagged missing.
Column build_column(std::string name, std::span<const std::string> raw,
                    const MissingTokens& missing = {});
Column build_column(std::string name, std::span<const std::string> raw, ColumnKind kind,
                    const MissingTokens& missing = {});
Column build_column(std::string name, std::span<const std::string> raw,
                    std::span<const std::uint8_t> mask, ColumnKind kind,
                    const MissingTokens& missing = {});

}  // namespace forge
