#include "forge/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#ifdef FORGE_USE_OPENMP
#include <omp.h>
#endif

#include "forge/errors.hpp"

namespace forge {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

namespace kernels {

namespace {

struct Clusters {
  std::vector<int> index;          // compact cluster id per point
  std::vector<std::size_t> sizes;  // points per compact id
};

Clusters compact(std::span<const int> labels) {
  std::map<int, int> ids;
  for (int l : labels) ids.emplace(l, 0);
  int next = 0;
  for (auto& [_, id] : ids) id = next++;
  Clusters c;
  c.sizes.assign(ids.size(), 0);
  c.index.reserve(labels.size());
  for (int l : labels) {
    const int id = ids.at(l);
    c.index.push_back(id);
    ++c.sizes[static_cast<std::size_t>(id)];
  }
  if (c.sizes.size() < 2) throw MetricError("silhouette needs at least two clusters");
  return c;
}

double point_silhouette(const Matrix& points, const Clusters& c, std::size_t i, std::vector<double>& sums) {
  const auto own = static_cast<std::size_t>(c.index[i]);
  if (c.sizes[own] == 1) return 0.0;
  std::fill(sums.begin(), sums.end(), 0.0);
  const auto pi = points.row(i);
  for (std::size_t j = 0; j < points.rows; ++j) {
    if (j == i) continue;
    sums[static_cast<std::size_t>(c.index[j])] += std::sqrt(squared_distance(pi, points.row(j)));
  }
  const double a = sums[own] / static_cast<double>(c.sizes[own] - 1);
  double b = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sums.size(); ++k)
    if (k != own) b = std::min(b, sums[k] / static_cast<double>(c.sizes[k]));
  const double denom = std::max(a, b);
  return denom > 0.0 ? (b - a) / denom : 0.0;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::size_t nearest(const Matrix& points, const Matrix& centroids, std::size_t i) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < centroids.rows; ++k) {
    const double d = squared_distance(points.row(i), centroids.row(k));
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

}  // namespace

std::vector<double> silhouette_values(const Matrix& points, std::span<const int> labels) {
  const Clusters c = compact(labels);
  const auto n = static_cast<long long>(points.rows);
  std::vector<double> s(points.rows, 0.0);
#ifdef FORGE_USE_OPENMP
#pragma omp parallel
#endif
  {
    std::vector<double> sums(c.sizes.size());
#ifdef FORGE_USE_OPENMP
#pragma omp for schedule(static)
#endif
    for (long long i = 0; i < n; ++i)
      s[static_cast<std::size_t>(i)] = point_silhouette(points, c, static_cast<std::size_t>(i), sums);
  }
  return s;
}

double silhouette(const Matrix& points, std::span<const int> labels) {
  return mean_of(silhouette_values(points, labels));
}

void assign_nearest(const Matrix& points, const Matrix& centroids, std::span<int> out) {
  const auto n = static_cast<long long>(points.rows);
#ifdef FORGE_USE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = static_cast<int>(nearest(points, centroids, static_cast<std::size_t>(i)));
}

int max_threads() {
#ifdef FORGE_USE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace serial {

std::vector<double> silhouette_values(const Matrix& points, std::span<const int> labels) {
  const Clusters c = compact(labels);
  std::vector<double> s(points.rows, 0.0);
  std::vector<double> sums(c.sizes.size());
  for (std::size_t i = 0; i < points.rows; ++i) s[i] = point_silhouette(points, c, i, sums);
  return s;
}

double silhouette(const Matrix& points, std::span<const int> labels) {
  return mean_of(silhouette_values(points, labels));
}

void assign_nearest(const Matrix& points, const Matrix& centroids, std::span<int> out) {
  for (std::size_t i = 0; i < points.rows; ++i) out[i] = static_cast<int>(nearest(points, centroids, i));
}

}  // namespace serial
}  // namespace kernels
}  // namespace forge
