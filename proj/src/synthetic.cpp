#include "forge/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "forge/random.hpp"

namespace forge {

namespace {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(splitmix64(seed)) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng_); }

  // Box-Muller, one value per call.
  double normal(double mean = 0.0, double sd = 1.0) {
    const double u1 = 1.0 - unit_uniform(rng_);
    const double u2 = unit_uniform(rng_);
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 rng_;
};

// Six decimals keeps the CSV files short and round-trips exactly.
double round6(double v) { return std::round(v * 1e6) / 1e6; }

Column numeric_column(std::string name, std::vector<double> v) {
  for (double& x : v) x = round6(x);
  return Column::numeric(std::move(name), std::move(v));
}

}  // namespace

SyntheticDataset make_interaction(std::uint64_t seed, std::size_t n) {
  Draw d(seed ^ 0x1001);
  std::vector<double> x1(n), x2(n), x3(n), x4(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x1[i] = d.uniform(0.5, 3.0);
    x2[i] = d.uniform(0.5, 3.0);
    x3[i] = d.uniform(0.5, 3.0);
    x4[i] = d.uniform(0.5, 3.0);
    y[i] = x1[i] * x2[i] + d.normal(0.0, 0.1);
  }
  std::vector<Column> cols;
  cols.push_back(numeric_column("x1", x1));
  cols.push_back(numeric_column("x2", x2));
  cols.push_back(numeric_column("x3", x3));
  cols.push_back(numeric_column("x4", x4));
  cols.push_back(numeric_column("y", y));
  return {"interaction", Table(std::move(cols), "y"), TaskKind::Regression};
}

SyntheticDataset make_skewed(std::uint64_t seed, std::size_t n) {
  Draw d(seed ^ 0x2002);
  std::vector<double> income(n), debt(n), age(n), score(n);
  std::vector<std::string> label(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = d.normal();
    income[i] = std::exp(1.5 * z + 3.0);
    debt[i] = std::exp(d.normal(1.0, 1.3));
    age[i] = std::round(d.uniform(18.0, 80.0));
    score[i] = d.normal(600.0, 50.0);
    const double logit = 1.4 * z - 0.6 * (std::log(debt[i]) - 1.0) + 0.02 * (score[i] - 600.0) + d.normal(0.0, 0.8);
    label[i] = logit > 0.0 ? "approve" : "deny";
  }
  std::vector<Column> cols;
  cols.push_back(numeric_column("income", income));
  cols.push_back(numeric_column("debt", debt));
  cols.push_back(numeric_column("age", age));
  cols.push_back(numeric_column("score", score));
  cols.push_back(Column::categorical("decision", label));
  return {"skewed", Table(std::move(cols), "decision"), TaskKind::Classification};
}

SyntheticDataset make_redundant(std::uint64_t seed, std::size_t n) {
  Draw d(seed ^ 0x3003);
  constexpr std::size_t kSignals = 3, kCopies = 20, kNoise = 20;
  std::vector<std::vector<double>> latent(kSignals, std::vector<double>(n));
  std::vector<std::string> label(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < kSignals; ++k) {
      latent[k][i] = d.normal();
      s += latent[k][i];
    }
    label[i] = s + d.normal(0.0, 0.5) > 0.0 ? "yes" : "no";
  }
  std::vector<Column> cols;
  for (std::size_t c = 0; c < kCopies; ++c) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = latent[c % kSignals][i] + d.normal(0.0, 0.3);
    cols.push_back(numeric_column("s" + std::to_string(c + 1), v));
  }
  for (std::size_t c = 0; c < kNoise; ++c) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = d.normal();
    cols.push_back(numeric_column("n" + std::to_string(c + 1), v));
  }
  cols.push_back(Column::categorical("label", label));
  return {"redundant", Table(std::move(cols), "label"), TaskKind::Classification};
}

SyntheticDataset make_blobs(std::uint64_t seed, std::size_t n) {
  Draw d(seed ^ 0x4004);
  std::vector<double> a(n), b(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double centre = i % 2 == 0 ? 0.0 : 6.0;
    a[i] = d.normal(centre, 1.0);
    b[i] = d.normal(centre, 1.0);
    c[i] = d.normal(0.0, 1.0);
  }
  std::vector<Column> cols;
  cols.push_back(numeric_column("a", a));
  cols.push_back(numeric_column("b", b));
  cols.push_back(numeric_column("c", c));
  return {"blobs", Table(std::move(cols)), TaskKind::Unsupervised};
}

std::vector<SyntheticDataset> synthetic_suite(std::uint64_t seed) {
  return {make_interaction(seed), make_skewed(seed), make_redundant(seed), make_blobs(seed)};
}

}  // namespace forge
