#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace forge {

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
};

double squared_distance(std::span<const double> a, std::span<const double> b);

// Data-parallel kernels. Each has a serial twin in kernels::serial that is
// kept as the reference for tests and benchmarks; both produce bit-identical
// results because per-row work is reduced in a fixed order.
namespace kernels {

// Mean silhouette over all points (Euclidean). Points in singleton clusters
// score 0. Labels may be any integers. Throws MetricError with fewer than two
// clusters.
double silhouette(const Matrix& points, std::span<const int> labels);

// Index of the nearest centroid for every row; ties go to the lower index.
void assign_nearest(const Matrix& points, const Matrix& centroids, std::span<int> out);

// Per-point silhouette values.
std::vector<double> silhouette_values(const Matrix& points, std::span<const int> labels);

namespace serial {
double silhouette(const Matrix& points, std::span<const int> labels);
void assign_nearest(const Matrix& points, const Matrix& centroids, std::span<int> out);
std::vector<double> silhouette_values(const Matrix& points, std::span<const int> labels);
}  // namespace serial

// Worker threads available to the parallel kernels (1 without OpenMP).
int max_threads();

}  // namespace kernels
}  // namespace forge
