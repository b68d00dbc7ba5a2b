#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "forge/kernels.hpp"

namespace forge {

enum class LearnerKind { CartTree, LinearLeastSquares, LogisticRegression, KMeans };

std::string_view to_string(LearnerKind kind);

// Fixed per run and echoed into every evaluation result.
struct LearnerSpec {
  LearnerKind kind = LearnerKind::CartTree;
  std::size_t max_depth = 6;  // tree
  std::size_t min_leaf = 5;   // tree
  double l2 = 1e-3;           // linear / logistic
  std::size_t iterations = 200;   // logistic gradient descent
  double learning_rate = 0.1;     // logistic gradient descent
  std::size_t k_min = 2;          // kmeans sweep
  std::size_t k_max = 8;
  std::size_t kmeans_iterations = 50;

  friend bool operator==(const LearnerSpec&, const LearnerSpec&) = default;
};

// CART with Gini (classification) or squared-error (regression) splits.
// Candidate thresholds are midpoints between consecutive distinct values;
// ties between equally good splits go to the earlier feature, then the lower
// threshold.
class CartTree {
 public:
  CartTree(std::size_t max_depth, std::size_t min_leaf) : max_depth_(max_depth), min_leaf_(min_leaf) {}

  void fit_classifier(const Matrix& x, std::span<const int> y, std::size_t n_classes,
                      std::span<const std::size_t> rows);
  void fit_regressor(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows);

  // Class index (classifier) or mean response (regressor).
  double predict(std::span<const double> row) const;
  // Leaf frequency of the highest class index; classifiers only.
  double score(std::span<const double> row) const;

  std::size_t n_nodes() const { return nodes_.size(); }
  std::size_t n_leaves() const;

 private:
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    double score = 0.0;
  };

  int build(const Matrix& x, std::vector<std::size_t> rows, std::size_t depth);
  const Node& leaf_for(std::span<const double> row) const;

  std::size_t max_depth_;
  std::size_t min_leaf_;
  bool classification_ = true;
  std::size_t n_classes_ = 0;
  std::span<const int> y_class_;
  std::span<const double> y_value_;
  std::vector<Node> nodes_;
};

// Ridge regression on standardized features.
class LinearModel {
 public:
  void fit(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows, double l2);
  double predict(std::span<const double> row) const;

 private:
  std::vector<double> mean_, scale_, weights_;
  double intercept_ = 0.0;
};

// L2-regularized logistic regression trained by full-batch gradient descent,
// one-vs-rest for more than two classes.
class LogisticModel {
 public:
  void fit(const Matrix& x, std::span<const int> y, std::size_t n_classes, std::span<const std::size_t> rows,
           const LearnerSpec& spec);
  double predict(std::span<const double> row) const;
  double score(std::span<const double> row) const;

 private:
  double margin(std::size_t model, std::span<const double> row) const;

  std::vector<double> mean_, scale_;
  std::vector<std::vector<double>> weights_;
  std::vector<double> bias_;
  std::size_t n_classes_ = 0;
};

struct KMeansResult {
  std::size_t k = 0;
  std::vector<int> assignment;
  Matrix centroids;
  std::size_t iterations_run = 0;
};

// Lloyd's algorithm with k-means++ seeding from a seeded mt19937_64.
KMeansResult kmeans(const Matrix& points, std::size_t k, std::size_t iterations, std::uint64_t seed);

}  // namespace forge
