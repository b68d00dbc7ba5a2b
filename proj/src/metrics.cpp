#include "forge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "forge/errors.hpp"

namespace forge {

namespace {

template <typename A, typename B>
void check_pair(std::span<A> a, std::span<B> b, const char* name) {
  if (a.empty()) throw MetricError(std::string(name) + ": empty input");
  if (a.size() != b.size()) throw MetricError(std::string(name) + ": length mismatch");
}

}  // namespace

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::F1Macro: return "f1_macro";
    case MetricKind::Auc: return "auc";
    case MetricKind::Rmse: return "rmse";
    case MetricKind::Mae: return "mae";
    case MetricKind::OneMinusRae: return "one_minus_rae";
    case MetricKind::Silhouette: return "silhouette";
  }
  return "?";
}

double f1_macro(std::span<const int> y_true, std::span<const int> y_pred) {
  check_pair(y_true, y_pred, "f1_macro");
  std::set<int> classes(y_true.begin(), y_true.end());
  classes.insert(y_pred.begin(), y_pred.end());
  double total = 0.0;
  for (int c : classes) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      const bool t = y_true[i] == c, p = y_pred[i] == c;
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
    }
    // 2PR / (P + R) == 2tp / (2tp + fp + fn)
    const double denom = 2.0 * static_cast<double>(tp) + static_cast<double>(fp + fn);
    total += denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
  }
  return total / static_cast<double>(classes.size());
}

double one_minus_rae(std::span<const double> y_true, std::span<const double> y_pred) {
  check_pair(y_true, y_pred, "one_minus_rae");
  const double n = static_cast<double>(y_true.size());
  double mean = 0.0;
  for (double y : y_true) mean += y / n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    num += std::abs(y_true[i] - y_pred[i]);
    den += std::abs(y_true[i] - mean);
  }
  if (!(den > 0.0)) throw MetricError("one_minus_rae: y_true is constant");
  return 1.0 - num / den;
}

double auc_binary(std::span<const int> y_true, std::span<const double> scores) {
  check_pair(y_true, scores, "auc_binary");
  const std::set<int> labels(y_true.begin(), y_true.end());
  if (labels.size() != 2) throw MetricError("auc_binary: exactly two classes required");
  const int positive = *labels.rbegin();

  // Rank-sum formulation with average ranks for ties.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (y_true[order[k]] == positive) {
        rank_sum += avg_rank;
        ++n_pos;
      }
    i = j;
  }
  const double p = static_cast<double>(n_pos);
  const double q = static_cast<double>(y_true.size() - n_pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

double rmse(std::span<const double> y_true, std::span<const double> y_pred) {
  check_pair(y_true, y_pred, "rmse");
  double s = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double d = y_true[i] - y_pred[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(y_true.size()));
}

double mae(std::span<const double> y_true, std::span<const double> y_pred) {
  check_pair(y_true, y_pred, "mae");
  double s = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) s += std::abs(y_true[i] - y_pred[i]);
  return s / static_cast<double>(y_true.size());
}

double silhouette(const Matrix& points, std::span<const int> assignments) {
  if (points.rows != assignments.size()) throw MetricError("silhouette: length mismatch");
  if (points.rows == 0) throw MetricError("silhouette: empty input");
  return kernels::silhouette(points, assignments);
}

}  // namespace forge
