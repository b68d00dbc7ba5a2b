#include "forge/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "forge/errors.hpp"
#include "forge/random.hpp"

namespace forge {

namespace {

constexpr double kMinGain = 1e-12;

void standardize_fit(const Matrix& x, std::span<const std::size_t> rows, std::vector<double>& mean,
                     std::vector<double>& scale) {
  mean.assign(x.cols, 0.0);
  scale.assign(x.cols, 1.0);
  const double n = static_cast<double>(rows.size());
  for (std::size_t j = 0; j < x.cols; ++j) {
    double m = 0.0;
    for (std::size_t r : rows) m += x(r, j) / n;
    double v = 0.0;
    for (std::size_t r : rows) v += (x(r, j) - m) * (x(r, j) - m);
    const double sd = std::sqrt(v / n);
    mean[j] = m;
    scale[j] = sd > 0.0 && std::isfinite(sd) ? sd : 1.0;
  }
}

// Solves (A) w = b for symmetric positive definite A in place (Cholesky).
bool cholesky_solve(std::vector<double> a, std::vector<double>& b, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    a[j * n + j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k];
    b[i] = s / a[i * n + i];
  }
  return true;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

std::string_view to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::CartTree: return "cart_tree";
    case LearnerKind::LinearLeastSquares: return "linear_least_squares";
    case LearnerKind::LogisticRegression: return "logistic_regression";
    case LearnerKind::KMeans: return "kmeans";
  }
  return "?";
}

// --- CART ----------------------------------------------------------------

void CartTree::fit_classifier(const Matrix& x, std::span<const int> y, std::size_t n_classes,
                              std::span<const std::size_t> rows) {
  classification_ = true;
  n_classes_ = std::max<std::size_t>(n_classes, 1);
  y_class_ = y;
  nodes_.clear();
  build(x, std::vector<std::size_t>(rows.begin(), rows.end()), 0);
  y_class_ = {};
}

void CartTree::fit_regressor(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows) {
  classification_ = false;
  y_value_ = y;
  nodes_.clear();
  build(x, std::vector<std::size_t>(rows.begin(), rows.end()), 0);
  y_value_ = {};
}

int CartTree::build(const Matrix& x, std::vector<std::size_t> rows, std::size_t depth) {
  const auto id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  const std::size_t n = rows.size();
  const double nd = static_cast<double>(n);

  // Node summary and impurity (Gini * n, or SSE).
  std::vector<double> counts;
  double parent = 0.0;
  double mean = 0.0;
  bool pure = true;
  if (classification_) {
    counts.assign(n_classes_, 0.0);
    for (std::size_t r : rows) counts[static_cast<std::size_t>(y_class_[r])] += 1.0;
    std::size_t best = 0;
    double sq = 0.0;
    for (std::size_t c = 0; c < n_classes_; ++c) {
      if (counts[c] > counts[best]) best = c;
      sq += counts[c] * counts[c];
      if (counts[c] > 0.0 && counts[c] < nd) pure = false;
    }
    nodes_[id].value = static_cast<double>(best);
    nodes_[id].score = n ? counts[n_classes_ - 1] / nd : 0.0;
    parent = n ? nd - sq / nd : 0.0;
  } else {
    for (std::size_t r : rows) mean += y_value_[r] / nd;
    for (std::size_t r : rows) {
      const double d = y_value_[r] - mean;
      parent += d * d;
      if (y_value_[r] != y_value_[rows.front()]) pure = false;
    }
    nodes_[id].value = mean;
  }

  if (depth >= max_depth_ || n < 2 * min_leaf_ || pure || n < 2) return id;

  int best_feature = -1;
  double best_threshold = 0.0;
  double best_gain = kMinGain;
  std::vector<std::size_t> order(rows);
  std::vector<double> left_counts(classification_ ? n_classes_ : 0);
  for (std::size_t f = 0; f < x.cols; ++f) {
    order = rows;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
    if (x(order.front(), f) == x(order.back(), f)) continue;

    std::fill(left_counts.begin(), left_counts.end(), 0.0);
    double left_sum = 0.0, left_sq = 0.0;
    double total_sum = 0.0, total_sq = 0.0;
    if (!classification_)
      for (std::size_t r : order) {
        const double d = y_value_[r] - mean;
        total_sum += d;
        total_sq += d * d;
      }
    double left_cls_sq = 0.0;
    std::vector<double> right_counts = counts;
    double right_cls_sq = 0.0;
    if (classification_)
      for (double c : counts) right_cls_sq += c * c;

    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t r = order[i];
      if (classification_) {
        const auto c = static_cast<std::size_t>(y_class_[r]);
        left_cls_sq += 2.0 * left_counts[c] + 1.0;
        left_counts[c] += 1.0;
        right_cls_sq -= 2.0 * right_counts[c] - 1.0;
        right_counts[c] -= 1.0;
      } else {
        const double d = y_value_[r] - mean;
        left_sum += d;
        left_sq += d * d;
      }
      const std::size_t nl = i + 1, nr = n - nl;
      if (nl < min_leaf_) continue;
      if (nr < min_leaf_) break;
      const double a = x(r, f), b = x(order[i + 1], f);
      if (a == b) continue;

      const double dl = static_cast<double>(nl), dr = static_cast<double>(nr);
      double child = 0.0;
      if (classification_) {
        child = (dl - left_cls_sq / dl) + (dr - right_cls_sq / dr);
      } else {
        const double right_sum = total_sum - left_sum, right_sq = total_sq - left_sq;
        child = (left_sq - left_sum * left_sum / dl) + (right_sq - right_sum * right_sum / dr);
      }
      const double gain = parent - child;
      if (gain > best_gain) {
        best_gain = gain;
        best_feature = static_cast<int>(f);
        double mid = a / 2 + b / 2;
        if (!(mid < b)) mid = a;
        best_threshold = mid;
      }
    }
  }
  if (best_feature < 0) return id;

  std::vector<std::size_t> left, right;
  for (std::size_t r : rows)
    (x(r, static_cast<std::size_t>(best_feature)) <= best_threshold ? left : right).push_back(r);
  rows.clear();
  rows.shrink_to_fit();
  nodes_[id].feature = best_feature;
  nodes_[id].threshold = best_threshold;
  const int l = build(x, std::move(left), depth + 1);
  nodes_[id].left = l;
  const int rr = build(x, std::move(right), depth + 1);
  nodes_[id].right = rr;
  return id;
}

const CartTree::Node& CartTree::leaf_for(std::span<const double> row) const {
  if (nodes_.empty()) throw ContractViolation("tree used before fit");
  const Node* node = &nodes_.front();
  while (node->feature >= 0)
    node = &nodes_[static_cast<std::size_t>(row[static_cast<std::size_t>(node->feature)] <= node->threshold
                                                ? node->left
                                                : node->right)];
  return *node;
}

double CartTree::predict(std::span<const double> row) const { return leaf_for(row).value; }
double CartTree::score(std::span<const double> row) const { return leaf_for(row).score; }

std::size_t CartTree::n_leaves() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

// --- linear --------------------------------------------------------------

void LinearModel::fit(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows, double l2) {
  standardize_fit(x, rows, mean_, scale_);
  const std::size_t d = x.cols;
  const double n = static_cast<double>(rows.size());
  intercept_ = 0.0;
  for (std::size_t r : rows) intercept_ += y[r] / n;
  std::vector<double> a(d * d, 0.0), b(d, 0.0), z(d);
  for (std::size_t r : rows) {
    for (std::size_t j = 0; j < d; ++j) z[j] = (x(r, j) - mean_[j]) / scale_[j];
    const double t = y[r] - intercept_;
    for (std::size_t i = 0; i < d; ++i) {
      b[i] += z[i] * t;
      for (std::size_t j = 0; j <= i; ++j) a[i * d + j] += z[i] * z[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < i; ++j) a[j * d + i] = a[i * d + j];
    a[i * d + i] += l2 * n;
  }
  weights_ = b;
  double jitter = 1e-9 * n;
  while (!cholesky_solve(a, weights_, d)) {
    for (std::size_t i = 0; i < d; ++i) a[i * d + i] += jitter;
    jitter *= 10.0;
    weights_ = b;
  }
}

double LinearModel::predict(std::span<const double> row) const {
  double v = intercept_;
  for (std::size_t j = 0; j < weights_.size(); ++j) v += weights_[j] * (row[j] - mean_[j]) / scale_[j];
  return v;
}

// --- logistic ------------------------------------------------------------

void LogisticModel::fit(const Matrix& x, std::span<const int> y, std::size_t n_classes,
                        std::span<const std::size_t> rows, const LearnerSpec& spec) {
  standardize_fit(x, rows, mean_, scale_);
  n_classes_ = std::max<std::size_t>(n_classes, 1);
  const std::size_t models = n_classes_ <= 2 ? 1 : n_classes_;
  const std::size_t d = x.cols;
  const double n = static_cast<double>(rows.size());
  weights_.assign(models, std::vector<double>(d, 0.0));
  bias_.assign(models, 0.0);

  Matrix z(rows.size(), d);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) z(i, j) = (x(rows[i], j) - mean_[j]) / scale_[j];

  std::vector<double> grad(d);
  for (std::size_t m = 0; m < models; ++m) {
    const int positive = n_classes_ <= 2 ? static_cast<int>(n_classes_) - 1 : static_cast<int>(m);
    auto& w = weights_[m];
    double& b = bias_[m];
    for (std::size_t it = 0; it < spec.iterations; ++it) {
      std::fill(grad.begin(), grad.end(), 0.0);
      double gb = 0.0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        double s = b;
        for (std::size_t j = 0; j < d; ++j) s += w[j] * z(i, j);
        const double err = sigmoid(s) - (y[rows[i]] == positive ? 1.0 : 0.0);
        for (std::size_t j = 0; j < d; ++j) grad[j] += err * z(i, j);
        gb += err;
      }
      for (std::size_t j = 0; j < d; ++j) w[j] -= spec.learning_rate * (grad[j] / n + spec.l2 * w[j]);
      b -= spec.learning_rate * gb / n;
    }
  }
}

double LogisticModel::margin(std::size_t model, std::span<const double> row) const {
  double s = bias_[model];
  for (std::size_t j = 0; j < row.size(); ++j) s += weights_[model][j] * (row[j] - mean_[j]) / scale_[j];
  return s;
}

double LogisticModel::score(std::span<const double> row) const { return sigmoid(margin(0, row)); }

double LogisticModel::predict(std::span<const double> row) const {
  if (n_classes_ <= 2) return score(row) >= 0.5 ? static_cast<double>(n_classes_) - 1.0 : 0.0;
  std::size_t best = 0;
  double best_m = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < weights_.size(); ++m) {
    const double v = margin(m, row);
    if (v > best_m) {
      best_m = v;
      best = m;
    }
  }
  return static_cast<double>(best);
}

// --- kmeans --------------------------------------------------------------

KMeansResult kmeans(const Matrix& points, std::size_t k, std::size_t iterations, std::uint64_t seed) {
  const std::size_t n = points.rows, d = points.cols;
  if (k == 0 || k > n) throw EvaluationError("kmeans: k must lie in [1, n]");
  std::mt19937_64 rng(seed);
  KMeansResult res;
  res.k = k;
  res.centroids = Matrix(k, d);

  // k-means++ seeding.
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::size_t first = static_cast<std::size_t>(rng() % n);
  std::copy(points.row(first).begin(), points.row(first).end(), res.centroids.row(0).begin());
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = std::min(dist[i], squared_distance(points.row(i), res.centroids.row(c - 1)));
      total += dist[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = unit_uniform(rng) * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += dist[i];
        if (acc > target && dist[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(rng() % n);
    }
    std::copy(points.row(pick).begin(), points.row(pick).end(), res.centroids.row(c).begin());
  }

  res.assignment.assign(n, -1);
  std::vector<int> next(n, 0);
  for (std::size_t it = 0; it < iterations; ++it) {
    kernels::assign_nearest(points, res.centroids, next);
    const bool changed = next != res.assignment;
    res.assignment = next;
    res.iterations_run = it + 1;
    if (!changed) break;

    Matrix sums(k, d);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(res.assignment[i]);
      ++counts[c];
      for (std::size_t j = 0; j < d; ++j) sums(c, j) += points(i, j);
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Re-seed an empty cluster at the point farthest from its centroid.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double dd = squared_distance(points.row(i), res.centroids.row(static_cast<std::size_t>(res.assignment[i])));
          if (dd > far_d) {
            far_d = dd;
            far = i;
          }
        }
        std::copy(points.row(far).begin(), points.row(far).end(), res.centroids.row(c).begin());
        continue;
      }
      for (std::size_t j = 0; j < d; ++j) res.centroids(c, j) = sums(c, j) / static_cast<double>(counts[c]);
    }
  }
  return res;
}

}  // namespace forge
