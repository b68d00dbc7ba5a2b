#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "forge/table.hpp"

namespace forge {

struct ColumnProfile {
  std::string name;
  ColumnKind kind = ColumnKind::Text;
  double missing_rate = 0.0;
  std::size_t n_distinct = 0;

  // Numeric columns only.
  std::optional<double> min;
  std::optional<double> max;
  std::optional<double> mean;
  std::optional<double> stddev;    // sample (n - 1) convention
  std::optional<double> skewness;  // moment coefficient m3 / m2^1.5

  // Categorical columns only: up to 5 most frequent labels, ties broken
  // lexicographically.
  std::vector<std::pair<std::string, std::size_t>> top_values;

  // Over non-missing cells of Numeric columns.
  bool has_zero = false;
  bool has_nonpositive = false;
  bool integral = false;  // every non-missing value is a whole number
  double min_abs = 0.0;   // smallest |x|; 0 iff has_zero

  bool is_target = false;
  // |Pearson| input: correlation of a Numeric feature with the numerically
  // encoded target. Absent without a target or when undefined.
  std::optional<double> target_correlation;

  friend bool operator==(const ColumnProfile&, const ColumnProfile&) = default;
};

// One profile per column, in column order. Pure and deterministic.
std::vector<ColumnProfile> profile(const Table& table);

struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double skewness = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Moments over the non-missing cells. Magnitudes are rescaled internally so
// any finite input yields finite moments.
Moments numeric_moments(std::span<const double> values, std::span<const std::uint8_t> missing);

// Pearson correlation over rows where both sides are present; nullopt when
// either side is constant or fewer than two rows remain.
std::optional<double> pearson(std::span<const double> x, std::span<const std::uint8_t> x_missing,
                              std::span<const double> y, std::span<const std::uint8_t> y_missing);

// Target as numbers: Numeric/Boolean/Datetime values pass through, labels map
// to their index in lexicographic order. Missing cells stay NaN.
std::vector<double> encode_target(const Column& target);

}  // namespace forge
