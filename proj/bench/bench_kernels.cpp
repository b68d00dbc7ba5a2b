// Times the OpenMP kernels against their serial reference versions and checks
// that both give identical results.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "CLI11.hpp"
#include "forge/kernels.hpp"

using namespace forge;

namespace {

double best_ms(std::size_t repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (std::size_t i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool same) {
  std::printf("%-16s serial %10.2f ms  parallel %10.2f ms  speedup %5.2fx  %s\n", name, serial, parallel,
              serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t rows = 4000, dims = 8, clusters = 6, repeats = 5;
  std::uint64_t seed = 1;
  CLI::App app{"Benchmark of the parallel and serial kernels", "bench_kernels"};
  app.add_option("--rows", rows, "Points")->capture_default_str();
  app.add_option("--dims", dims, "Dimensions")->capture_default_str();
  app.add_option("--clusters", clusters, "Clusters and centroids")->capture_default_str();
  app.add_option("--repeats", repeats, "Timed repetitions; the best is reported")->capture_default_str();
  app.add_option("--seed", seed, "Data seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  if (rows < 2 || dims < 1 || clusters < 2 || repeats < 1) {
    std::fprintf(stderr, "bench_kernels: need rows >= 2, dims >= 1, clusters >= 2, repeats >= 1\n");
    return 1;
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Matrix points(rows, dims), centroids(clusters, dims);
  std::vector<int> labels(rows);
  for (std::size_t c = 0; c < clusters; ++c)
    for (std::size_t d = 0; d < dims; ++d) centroids(c, d) = 5.0 * noise(rng);
  for (std::size_t r = 0; r < rows; ++r) {
    labels[r] = static_cast<int>(r % clusters);
    for (std::size_t d = 0; d < dims; ++d) points(r, d) = centroids(labels[r], d) + noise(rng);
  }

  std::printf("rows %zu, dims %zu, clusters %zu, threads %d, best of %zu\n", rows, dims, clusters,
              kernels::max_threads(), repeats);

  double s_ser = 0, s_par = 0;
  const double t_ser = best_ms(repeats, [&] { s_ser = kernels::serial::silhouette(points, labels); });
  const double t_par = best_ms(repeats, [&] { s_par = kernels::silhouette(points, labels); });
  report("silhouette", t_ser, t_par, s_ser == s_par);

  std::vector<int> a_ser(rows), a_par(rows);
  const double u_ser = best_ms(repeats, [&] { kernels::serial::assign_nearest(points, centroids, a_ser); });
  const double u_par = best_ms(repeats, [&] { kernels::assign_nearest(points, centroids, a_par); });
  report("assign_nearest", u_ser, u_par, a_ser == a_par);

  return s_ser == s_par && a_ser == a_par ? 0 : 2;
}
