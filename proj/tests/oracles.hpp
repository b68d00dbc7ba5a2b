#pragma once

// Brute-force reference implementations, written independently of the
// library for cross-checking.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

namespace forge::oracle {

inline double f1_macro(const std::vector<int>& t, const std::vector<int>& p) {
  std::set<int> classes(t.begin(), t.end());
  classes.insert(p.begin(), p.end());
  double sum = 0.0;
  for (int c : classes) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (p[i] == c && t[i] == c) tp++;
      if (p[i] == c && t[i] != c) fp++;
      if (p[i] != c && t[i] == c) fn++;
    }
    const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    sum += prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
  }
  return sum / static_cast<double>(classes.size());
}

inline double one_minus_rae(const std::vector<double>& y, const std::vector<double>& yhat) {
  double mean = 0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    num += std::abs(y[i] - yhat[i]);
    den += std::abs(y[i] - mean);
  }
  return 1.0 - num / den;
}

inline double auc(const std::vector<int>& y, const std::vector<double>& s) {
  const int pos = *std::max_element(y.begin(), y.end());
  double favourable = 0, pairs = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[i] != pos || y[j] == pos) continue;
      pairs += 1;
      if (s[i] > s[j]) favourable += 1;
      else if (s[i] == s[j]) favourable += 0.5;
    }
  return favourable / pairs;
}

inline double rmse(const std::vector<double>& y, const std::vector<double>& yhat) {
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  return std::sqrt(s / static_cast<double>(y.size()));
}

inline double mae(const std::vector<double>& y, const std::vector<double>& yhat) {
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
  return s / static_cast<double>(y.size());
}

inline double silhouette(const std::vector<std::vector<double>>& pts, const std::vector<int>& lab) {
  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0;
    for (std::size_t k = 0; k < pts[i].size(); ++k) s += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
    return std::sqrt(s);
  };
  std::map<int, int> sizes;
  for (int l : lab) sizes[l]++;
  double total = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (sizes[lab[i]] == 1) continue;
    std::map<int, double> sum;
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (j != i) sum[lab[j]] += dist(i, j);
    const double a = sum[lab[i]] / (sizes[lab[i]] - 1);
    double b = INFINITY;
    for (auto [l, n] : sizes)
      if (l != lab[i]) b = std::min(b, sum[l] / n);
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(pts.size());
}

}  // namespace forge::oracle
