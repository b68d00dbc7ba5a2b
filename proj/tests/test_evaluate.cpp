#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "forge/errors.hpp"
#include "forge/evaluate.hpp"
#include "forge/random.hpp"
#include "forge/synthetic.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace forge;
using doctest::Approx;

namespace {

DesignMatrix matrix_of(const std::vector<std::vector<double>>& rows) {
  DesignMatrix d;
  d.x = Matrix(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) d.x(r, c) = rows[r][c];
  for (std::size_t c = 0; c < d.x.cols; ++c) d.feature_names.push_back("f" + std::to_string(c));
  return d;
}

std::vector<std::vector<double>> rows_of(const Matrix& m) {
  std::vector<std::vector<double>> out(m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) out[r].assign(m.row(r).begin(), m.row(r).end());
  return out;
}

}  // namespace

TEST_CASE("feature encoding") {
  const Table t = test::csv("b,c,n,d,y\ntrue,red,1.5,2020-01-01,a\nfalse,blue,2,2020-01-02,b\ntrue,red,3,2020-01-03,a\n", "y");
  const DesignMatrix d = encode_features(t, TaskKind::Classification);
  CHECK(d.feature_names == std::vector<std::string>{"b", "c=blue", "c=red", "n"});
  CHECK(d.x.rows == 3);
  CHECK(d.x(0, 0) == 1.0);
  CHECK(d.x(1, 0) == 0.0);
  CHECK(d.x(0, 1) == 0.0);
  CHECK(d.x(0, 2) == 1.0);
  CHECK(d.x(1, 1) == 1.0);
  CHECK(d.x(2, 3) == 3.0);
  CHECK(d.labels == std::vector<int>{0, 1, 0});
  CHECK(d.classes == std::vector<std::string>{"a", "b"});
}

TEST_CASE("numeric class labels sort numerically") {
  const Table t = test::csv("x,y\n1,10\n2,9\n3,10\n4,2\n", "y");
  const DesignMatrix d = encode_features(t, TaskKind::Classification);
  CHECK(d.classes == std::vector<std::string>{"2", "9", "10"});
  CHECK(d.labels == std::vector<int>{2, 1, 2, 0});
}

TEST_CASE("encoding errors") {
  CHECK_THROWS_AS(encode_features(test::csv("x,y\n1,a\n,b\n", "y"), TaskKind::Classification), EvaluationError);
  CHECK_THROWS_AS(encode_features(test::csv("d,y\n2020-01-01,1\n2020-01-02,2\n", "y"), TaskKind::Regression), EvaluationError);
  CHECK_THROWS_AS(encode_features(test::csv("x,y\n1,a\n2,b\n", "y"), TaskKind::Regression), EvaluationError);
}

TEST_CASE("stratified folds") {
  std::vector<int> labels;
  for (int i = 0; i < 50; ++i) labels.push_back(i < 10 ? 1 : 0);
  const auto folds = assign_folds(labels.size(), labels, 5, 3);
  std::map<std::size_t, std::pair<int, int>> counts;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? counts[folds[i]].second : counts[folds[i]].first)++;
  REQUIRE(counts.size() == 5);
  for (const auto& [fold, c] : counts) {
    CHECK(c.first == 8);
    CHECK(c.second == 2);
  }
  CHECK(assign_folds(labels.size(), labels, 5, 3) == folds);
}

TEST_CASE("separable classes give perfect F1") {
  std::vector<std::vector<double>> rows;
  DesignMatrix d;
  std::vector<int> labels;
  for (int i = 0; i < 100; ++i) {
    rows.push_back({double(i), double(i % 7)});
    labels.push_back(i < 50 ? 0 : 1);
  }
  d = matrix_of(rows);
  d.labels = labels;
  d.classes = {"0", "1"};
  const EvalResult r = cross_validate(d, TaskKind::Classification, default_learner(TaskKind::Classification), 5, 1);
  CHECK(r.primary.kind == MetricKind::F1Macro);
  CHECK(r.primary.value == 1.0);
  CHECK(r.n_folds == 5);
  REQUIRE(r.secondary.size() == 1);
  CHECK(r.secondary[0].kind == MetricKind::Auc);
}

TEST_CASE("regression on y = x") {
  std::mt19937_64 rng(5);
  std::vector<std::vector<double>> rows;
  std::vector<double> y;
  for (int i = 0; i < 500; ++i) {
    const double x = unit_uniform(rng) * 100;
    rows.push_back({x});
    y.push_back(x);
  }
  DesignMatrix d = matrix_of(rows);
  d.response = y;
  const EvalResult r = cross_validate(d, TaskKind::Regression, default_learner(TaskKind::Regression), 5, 1);
  CHECK(r.primary.kind == MetricKind::OneMinusRae);
  CHECK(r.primary.value == Approx(1.0).epsilon(0.05));
  CHECK(r.secondary.size() == 2);
}

TEST_CASE("two blobs choose k = 2, matching a brute-force sweep") {
  const Table t = make_blobs(7).table;
  const DesignMatrix d = encode_features(t, TaskKind::Unsupervised);
  const LearnerSpec spec = default_learner(TaskKind::Unsupervised);
  const EvalResult r = cross_validate(d, TaskKind::Unsupervised, spec, 5, 11);
  CHECK(r.primary.kind == MetricKind::Silhouette);
  CHECK(r.k == 2);
  CHECK(r.primary.value > 0.6);

  const auto pts = rows_of(d.x);
  double best = -2;
  std::size_t best_k = 0;
  for (std::size_t k = spec.k_min; k <= spec.k_max; ++k) {
    const auto km = kmeans(d.x, k, spec.kmeans_iterations, splitmix64(11 + k));
    const double s = oracle::silhouette(pts, km.assignment);
    if (s > best) best = s, best_k = k;
  }
  CHECK(best_k == r.k);
  CHECK(r.primary.value == Approx(best).epsilon(1e-9));
}

TEST_CASE("duplicating a feature barely moves F1") {
  const Table t = make_skewed(7).table;
  const DesignMatrix d = encode_features(t, TaskKind::Classification);
  DesignMatrix dup = d;
  dup.x = Matrix(d.x.rows, d.x.cols + 1);
  for (std::size_t r = 0; r < d.x.rows; ++r) {
    for (std::size_t c = 0; c < d.x.cols; ++c) dup.x(r, c) = d.x(r, c);
    dup.x(r, d.x.cols) = d.x(r, 0);
  }
  dup.feature_names.push_back("copy");
  const auto spec = default_learner(TaskKind::Classification);
  const double a = cross_validate(d, TaskKind::Classification, spec, 5, 7).primary.value;
  const double b = cross_validate(dup, TaskKind::Classification, spec, 5, 7).primary.value;
  CHECK(std::abs(a - b) <= 0.02);
}

TEST_CASE("small classes reduce the fold count") {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) {
    rows.push_back({double(i)});
    labels.push_back(i < 3 ? 1 : 0);
  }
  DesignMatrix d = matrix_of(rows);
  d.labels = labels;
  d.classes = {"0", "1"};
  const EvalResult r = cross_validate(d, TaskKind::Classification, default_learner(TaskKind::Classification), 5, 1);
  CHECK(r.n_folds == 3);
  CHECK_FALSE(r.note.empty());
}

TEST_CASE("evaluation is reproducible") {
  const Table t = make_interaction(7).table;
  const EvalResult a = evaluate_table(t, TaskKind::Regression, 7);
  const EvalResult b = evaluate_table(t, TaskKind::Regression, 7);
  CHECK(a.primary == b.primary);
  CHECK(a.secondary == b.secondary);
  CHECK(a.learner.kind == LearnerKind::CartTree);
  CHECK(a.learner.max_depth == 6);
  CHECK(a.learner.min_leaf == 5);
}
