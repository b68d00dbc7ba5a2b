#pragma once

#include <span>
#include <string_view>

#include "forge/kernels.hpp"

namespace forge {

enum class MetricKind { F1Macro, Auc, Rmse, Mae, OneMinusRae, Silhouette };

std::string_view to_string(MetricKind kind);

struct Metric {
  MetricKind kind = MetricKind::F1Macro;
  double value = 0.0;
  friend bool operator==(const Metric&, const Metric&) = default;
};

// Mean of per-class F1 over every label seen in either sequence; a class with
// P + R = 0 scores 0. Throws MetricError on empty or mismatched input.
double f1_macro(std::span<const int> y_true, std::span<const int> y_pred);

// 1 - sum|y - yhat| / sum|y - mean(y)|. Throws MetricError when y_true is
// constant.
double one_minus_rae(std::span<const double> y_true, std::span<const double> y_pred);

// Mann-Whitney AUC, ties counted 1/2. The larger of the two labels is the
// positive class. Throws MetricError unless exactly two labels are present.
double auc_binary(std::span<const int> y_true, std::span<const double> scores);

double rmse(std::span<const double> y_true, std::span<const double> y_pred);
double mae(std::span<const double> y_true, std::span<const double> y_pred);

// Mean silhouette, Euclidean; singleton clusters score 0.
double silhouette(const Matrix& points, std::span<const int> assignments);

}  // namespace forge
