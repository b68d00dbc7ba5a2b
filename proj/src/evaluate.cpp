#include "forge/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>

#include "forge/errors.hpp"
#include "forge/random.hpp"

namespace forge {

namespace {

// Silhouette is quadratic in rows; larger matrices are scored on a seeded
// sample of this many rows.
constexpr std::size_t kSilhouetteSample = 2000;

struct FoldOutcome {
  std::optional<double> primary;
  std::optional<double> auc;
  std::optional<double> rmse;
  std::optional<double> mae;
  std::string error;
};

std::vector<std::size_t> rows_where(std::span<const std::size_t> folds, std::size_t fold, bool equal) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < folds.size(); ++i)
    if ((folds[i] == fold) == equal) out.push_back(i);
  return out;
}

FoldOutcome run_fold(const DesignMatrix& data, TaskKind task, const LearnerSpec& spec,
                     std::span<const std::size_t> folds, std::size_t fold) {
  FoldOutcome out;
  const auto train = rows_where(folds, fold, false);
  const auto test = rows_where(folds, fold, true);
  if (train.empty() || test.empty()) {
    out.error = "empty fold";
    return out;
  }
  try {
    if (task == TaskKind::Classification) {
      const std::size_t n_classes = data.classes.size();
      std::vector<int> truth, pred;
      std::vector<double> score;
      if (spec.kind == LearnerKind::LogisticRegression) {
        LogisticModel m;
        m.fit(data.x, data.labels, n_classes, train, spec);
        for (std::size_t r : test) {
          pred.push_back(static_cast<int>(m.predict(data.x.row(r))));
          score.push_back(m.score(data.x.row(r)));
        }
      } else {
        CartTree tree(spec.max_depth, spec.min_leaf);
        tree.fit_classifier(data.x, data.labels, n_classes, train);
        for (std::size_t r : test) {
          pred.push_back(static_cast<int>(tree.predict(data.x.row(r))));
          score.push_back(tree.score(data.x.row(r)));
        }
      }
      for (std::size_t r : test) truth.push_back(data.labels[r]);
      out.primary = f1_macro(truth, pred);
      if (n_classes == 2 && std::set<int>(truth.begin(), truth.end()).size() == 2) out.auc = auc_binary(truth, score);
    } else {
      std::vector<double> truth, pred;
      if (spec.kind == LearnerKind::LinearLeastSquares) {
        LinearModel m;
        m.fit(data.x, data.response, train, spec.l2);
        for (std::size_t r : test) pred.push_back(m.predict(data.x.row(r)));
      } else {
        CartTree tree(spec.max_depth, spec.min_leaf);
        tree.fit_regressor(data.x, data.response, train);
        for (std::size_t r : test) pred.push_back(tree.predict(data.x.row(r)));
      }
      for (std::size_t r : test) truth.push_back(data.response[r]);
      out.rmse = rmse(truth, pred);
      out.mae = mae(truth, pred);
      out.primary = one_minus_rae(truth, pred);
    }
  } catch (const MetricError& e) {
    out.error = e.what();
  }
  return out;
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

EvalResult cluster(const DesignMatrix& data, const LearnerSpec& spec, std::uint64_t seed) {
  const Matrix& x = data.x;
  if (x.rows < 3) throw EvaluationError("clustering needs at least 3 rows");

  // Rows used for scoring.
  std::vector<std::size_t> sample(x.rows);
  std::iota(sample.begin(), sample.end(), std::size_t{0});
  if (x.rows > kSilhouetteSample) {
    std::mt19937_64 rng(splitmix64(seed ^ 0x5111u));
    shuffle(std::span<std::size_t>(sample), rng);
    sample.resize(kSilhouetteSample);
    std::sort(sample.begin(), sample.end());
  }
  Matrix scored(sample.size(), x.cols);
  for (std::size_t i = 0; i < sample.size(); ++i)
    std::copy(x.row(sample[i]).begin(), x.row(sample[i]).end(), scored.row(i).begin());

  EvalResult res;
  res.primary = {MetricKind::Silhouette, -std::numeric_limits<double>::infinity()};
  const std::size_t k_hi = std::min(spec.k_max, x.rows - 1);
  for (std::size_t k = spec.k_min; k <= k_hi; ++k) {
    const KMeansResult km = kmeans(x, k, spec.kmeans_iterations, splitmix64(seed + k));
    std::vector<int> labels(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) labels[i] = km.assignment[sample[i]];
    if (std::set<int>(labels.begin(), labels.end()).size() < 2) continue;
    const double s = kernels::silhouette(scored, labels);
    if (s > res.primary.value) {
      res.primary.value = s;
      res.k = k;
    }
  }
  if (res.k == 0) throw EvaluationError("no clustering with at least two clusters was found");
  res.note = "k=" + std::to_string(res.k);
  if (sample.size() < x.rows) res.note += ", silhouette on " + std::to_string(sample.size()) + " sampled rows";
  return res;
}

}  // namespace

DesignMatrix encode_features(const Table& table, TaskKind task) {
  DesignMatrix out;
  const std::size_t n = table.n_rows();
  std::vector<std::vector<double>> cols;

  for (std::size_t idx : table.feature_indices()) {
    const Column& c = table.column(idx);
    if (c.kind == ColumnKind::Text || c.kind == ColumnKind::Datetime) continue;
    if (c.missing_count() > 0) throw EvaluationError("feature '" + c.name + "' has missing cells");
    if (c.kind == ColumnKind::Categorical) {
      const std::set<std::string> cats(c.labels.begin(), c.labels.end());
      for (const auto& cat : cats) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = c.labels[i] == cat ? 1.0 : 0.0;
        cols.push_back(std::move(v));
        out.feature_names.push_back(c.name + "=" + cat);
      }
      continue;
    }
    for (double v : c.values)
      if (!std::isfinite(v)) throw EvaluationError("feature '" + c.name + "' has non-finite values");
    cols.push_back(c.values);
    out.feature_names.push_back(c.name);
  }
  if (cols.empty()) throw EvaluationError("no usable feature columns");

  out.x = Matrix(n, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) out.x(i, j) = cols[j][i];

  if (task == TaskKind::Unsupervised) return out;
  if (!table.target()) throw EvaluationError("a supervised task needs a target column");
  const Column& y = table.column(*table.target());
  if (y.missing_count() > 0) throw EvaluationError("target '" + y.name + "' has missing cells");

  if (task == TaskKind::Regression) {
    if (y.kind != ColumnKind::Numeric) throw EvaluationError("regression target '" + y.name + "' is not numeric");
    out.response = y.values;
    return out;
  }

  out.labels.resize(n);
  if (y.has_values()) {
    const std::set<double> distinct(y.values.begin(), y.values.end());
    std::map<double, int> index;
    for (double v : distinct) {
      index.emplace(v, static_cast<int>(out.classes.size()));
      out.classes.push_back(y.has_labels() ? std::string{} : format_number(v));
    }
    if (y.has_labels())
      for (std::size_t i = 0; i < n; ++i) out.classes[static_cast<std::size_t>(index.at(y.values[i]))] = y.labels[i];
    for (std::size_t i = 0; i < n; ++i) out.labels[i] = index.at(y.values[i]);
  } else {
    const std::set<std::string> distinct(y.labels.begin(), y.labels.end());
    std::map<std::string, int> index;
    for (const auto& v : distinct) {
      index.emplace(v, static_cast<int>(out.classes.size()));
      out.classes.push_back(v);
    }
    for (std::size_t i = 0; i < n; ++i) out.labels[i] = index.at(y.labels[i]);
  }
  return out;
}

LearnerSpec default_learner(TaskKind task) {
  LearnerSpec spec;
  spec.kind = task == TaskKind::Unsupervised ? LearnerKind::KMeans : LearnerKind::CartTree;
  return spec;
}

std::vector<std::size_t> assign_folds(std::size_t n_rows, std::span<const int> labels, std::size_t n_folds,
                                      std::uint64_t seed) {
  if (n_folds == 0) throw ContractViolation("assign_folds: zero folds");
  std::mt19937_64 rng(splitmix64(seed));
  std::map<int, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < n_rows; ++i) strata[labels.empty() ? 0 : labels[i]].push_back(i);

  std::vector<std::size_t> folds(n_rows, 0);
  std::size_t next = 0;
  for (auto& [label, rows] : strata) {
    shuffle(std::span<std::size_t>(rows), rng);
    for (std::size_t r : rows) folds[r] = next++ % n_folds;
  }
  return folds;
}

EvalResult cross_validate(const DesignMatrix& data, TaskKind task, const LearnerSpec& spec, std::size_t n_folds,
                          std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  EvalResult res;
  if (task == TaskKind::Unsupervised) {
    res = cluster(data, spec, seed);
  } else {
    const std::size_t n = data.x.rows;
    if (n < 2) throw EvaluationError("cross-validation needs at least 2 rows");
    std::size_t folds_used = std::min(n_folds, n);
    std::vector<std::string> notes;
    if (folds_used < n_folds) notes.push_back("folds reduced to " + std::to_string(folds_used) + " (rows)");
    if (task == TaskKind::Classification) {
      if (data.labels.size() != n) throw EvaluationError("classification needs one label per row");
      std::map<int, std::size_t> counts;
      for (int l : data.labels) ++counts[l];
      std::size_t smallest = n;
      for (const auto& [l, c] : counts) smallest = std::min(smallest, c);
      if (smallest < folds_used) {
        folds_used = std::max<std::size_t>(2, smallest);
        notes.push_back("folds reduced to " + std::to_string(folds_used) + " (smallest class has " +
                        std::to_string(smallest) + " rows)");
      }
    } else if (data.response.size() != n) {
      throw EvaluationError("regression needs one response per row");
    }

    const auto folds = assign_folds(n, task == TaskKind::Classification ? std::span<const int>(data.labels)
                                                                        : std::span<const int>(),
                                    folds_used, seed);
    std::vector<FoldOutcome> outcomes(folds_used);
    const auto nf = static_cast<long>(folds_used);
#ifdef FORGE_USE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long f = 0; f < nf; ++f)
      outcomes[static_cast<std::size_t>(f)] = run_fold(data, task, spec, folds, static_cast<std::size_t>(f));

    std::vector<double> primary, auc, rmse_v, mae_v;
    std::size_t skipped = 0;
    for (const auto& o : outcomes) {
      if (!o.primary) {
        ++skipped;
        continue;
      }
      primary.push_back(*o.primary);
      if (o.auc) auc.push_back(*o.auc);
      if (o.rmse) rmse_v.push_back(*o.rmse);
      if (o.mae) mae_v.push_back(*o.mae);
    }
    if (primary.empty()) throw EvaluationError("metric undefined on every fold: " + outcomes.front().error);
    if (skipped) notes.push_back(std::to_string(skipped) + " fold(s) skipped: metric undefined");

    res.n_folds = folds_used;
    if (task == TaskKind::Classification) {
      res.primary = {MetricKind::F1Macro, mean_of(primary)};
      if (auc.size() == primary.size()) res.secondary.push_back({MetricKind::Auc, mean_of(auc)});
    } else {
      res.primary = {MetricKind::OneMinusRae, mean_of(primary)};
      res.secondary.push_back({MetricKind::Rmse, mean_of(rmse_v)});
      res.secondary.push_back({MetricKind::Mae, mean_of(mae_v)});
    }
    for (std::size_t i = 0; i < notes.size(); ++i) res.note += (i ? "; " : "") + notes[i];
  }
  res.learner = spec;
  res.seed = seed;
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

EvalResult evaluate_table(const Table& table, TaskKind task, std::uint64_t seed, std::size_t n_folds) {
  return cross_validate(encode_features(table, task), task, default_learner(task), n_folds, seed);
}

}  // namespace forge
