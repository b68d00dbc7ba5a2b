#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "forge/kernels.hpp"
#include "forge/learners.hpp"
#include "forge/metrics.hpp"
#include "forge/routing.hpp"
#include "forge/table.hpp"

namespace forge {

// Numeric view of a table for the learners.
struct DesignMatrix {
  Matrix x;
  std::vector<std::string> feature_names;  // one per matrix column
  std::vector<int> labels;                 // classification
  std::vector<std::string> classes;        // label index -> original value
  std::vector<double> response;            // regression
};

// Numeric columns pass through, Boolean becomes 0/1, Categorical is one-hot
// encoded with categories in lexicographic order ("col=value"); Text and
// Datetime columns are left out. Classification labels are indexed in the
// sorted order of their distinct values (numeric order for numeric targets).
// Throws EvaluationError when no usable feature remains, a feature cell is
// missing or non-finite, or the target does not suit the task.
DesignMatrix encode_features(const Table& table, TaskKind task);

struct EvalResult {
  Metric primary;
  std::vector<Metric> secondary;
  LearnerSpec learner;
  std::size_t n_folds = 0;  // 0 for unsupervised
  std::uint64_t seed = 0;
  double wall_time = 0.0;   // seconds
  std::size_t k = 0;        // clusters chosen by the kmeans sweep
  std::string note;         // e.g. reduced folds
};

LearnerSpec default_learner(TaskKind task);

// Fold index per row. Classification folds are stratified by label; rows of
// each class are shuffled with the seed and dealt round-robin.
std::vector<std::size_t> assign_folds(std::size_t n_rows, std::span<const int> labels, std::size_t n_folds,
                                      std::uint64_t seed);

// Mean primary metric across folds. Classification with a class smaller than
// n_folds runs with max(2, smallest class) folds and says so in `note`.
// Unsupervised runs the kmeans sweep on the full matrix and reports the best
// silhouette. Bit-reproducible for fixed inputs.
EvalResult cross_validate(const DesignMatrix& data, TaskKind task, const LearnerSpec& spec,
                          std::size_t n_folds = 5, std::uint64_t seed = 0);

// encode_features followed by cross_validate with the task's default learner.
EvalResult evaluate_table(const Table& table, TaskKind task, std::uint64_t seed, std::size_t n_folds = 5);

}  // namespace forge
