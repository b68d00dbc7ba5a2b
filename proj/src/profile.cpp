#include "forge/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace forge {

namespace {

// Above this magnitude sums of squares may overflow, so moments are taken
// on rescaled values.
constexpr double kRescaleAbove = 1e150;

}  // namespace

Moments numeric_moments(std::span<const double> values, std::span<const std::uint8_t> missing) {
  Moments m;
  double scale = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (missing[i]) continue;
    const double v = values[i];
    ++m.count;
    scale = std::max(scale, std::abs(v));
    if (first) {
      m.min = m.max = v;
      first = false;
    } else {
      m.min = std::min(m.min, v);
      m.max = std::max(m.max, v);
    }
  }
  if (m.count == 0) return m;
  const double s = scale > kRescaleAbove ? scale : 1.0;
  const double n = static_cast<double>(m.count);

  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!missing[i]) sum += values[i] / s;
  const double mean = sum / n;

  double m2 = 0.0, m3 = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (missing[i]) continue;
    const double d = values[i] / s - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m.mean = mean * s;
  m.stddev = m.count > 1 ? std::sqrt(m2 / (n - 1.0)) * s : 0.0;
  const double pop2 = m2 / n;
  m.skewness = pop2 > 0.0 ? (m3 / n) / std::pow(pop2, 1.5) : 0.0;
  if (!std::isfinite(m.skewness)) m.skewness = 0.0;
  return m;
}

std::optional<double> pearson(std::span<const double> x, std::span<const std::uint8_t> x_missing,
                              std::span<const double> y, std::span<const std::uint8_t> y_missing) {
  const auto present = [&](std::size_t i) {
    return !x_missing[i] && !y_missing[i] && std::isfinite(x[i]) && std::isfinite(y[i]);
  };
  std::size_t n = 0;
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!present(i)) continue;
    ++n;
    sx = std::max(sx, std::abs(x[i]));
    sy = std::max(sy, std::abs(y[i]));
  }
  if (n < 2 || sx == 0.0 || sy == 0.0) return std::nullopt;

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!present(i)) continue;
    mx += x[i] / sx;
    my += y[i] / sy;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!present(i)) continue;
    const double dx = x[i] / sx - mx;
    const double dy = y[i] / sy - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

std::vector<double> encode_target(const Column& target) {
  const std::size_t n = target.size();
  std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
  if (target.has_values()) {
    for (std::size_t i = 0; i < n; ++i)
      if (!target.is_missing(i)) out[i] = target.values[i];
    return out;
  }
  std::set<std::string> distinct;
  for (std::size_t i = 0; i < n; ++i)
    if (!target.is_missing(i)) distinct.insert(target.labels[i]);
  std::map<std::string, double> index;
  double next = 0.0;
  for (const auto& label : distinct) index.emplace(label, next++);
  for (std::size_t i = 0; i < n; ++i)
    if (!target.is_missing(i)) out[i] = index.at(target.labels[i]);
  return out;
}

std::vector<ColumnProfile> profile(const Table& table) {
  std::vector<ColumnProfile> out;
  out.reserve(table.n_cols());
  const std::size_t n = table.n_rows();

  std::vector<double> target_values;
  std::vector<std::uint8_t> target_missing;
  if (table.target()) {
    const Column& t = table.column(*table.target());
    target_values = encode_target(t);
    target_missing = t.missing;
  }

  for (std::size_t c = 0; c < table.n_cols(); ++c) {
    const Column& col = table.column(c);
    ColumnProfile p;
    p.name = col.name;
    p.kind = col.kind;
    p.is_target = table.is_target(col.name);
    p.missing_rate = n == 0 ? 0.0 : static_cast<double>(col.missing_count()) / static_cast<double>(n);

    if (col.has_values()) {
      std::set<double> distinct;
      for (std::size_t i = 0; i < n; ++i)
        if (!col.is_missing(i)) distinct.insert(col.values[i]);
      p.n_distinct = distinct.size();
    } else {
      std::set<std::string_view> distinct;
      for (std::size_t i = 0; i < n; ++i)
        if (!col.is_missing(i)) distinct.insert(col.labels[i]);
      p.n_distinct = distinct.size();
    }

    if (col.kind == ColumnKind::Numeric) {
      const Moments m = numeric_moments(col.values, col.missing);
      if (m.count > 0) {
        p.min = m.min;
        p.max = m.max;
        p.mean = m.mean;
        p.stddev = m.stddev;
        p.skewness = m.skewness;
        p.integral = true;
        p.min_abs = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
          if (col.is_missing(i)) continue;
          const double v = col.values[i];
          if (v == 0.0) p.has_zero = true;
          if (v <= 0.0) p.has_nonpositive = true;
          if (std::floor(v) != v) p.integral = false;
          p.min_abs = std::min(p.min_abs, std::abs(v));
        }
      }
      if (table.target() && !p.is_target)
        p.target_correlation = pearson(col.values, col.missing, target_values, target_missing);
    }

    if (col.kind == ColumnKind::Categorical) {
      std::map<std::string_view, std::size_t> counts;
      for (std::size_t i = 0; i < n; ++i)
        if (!col.is_missing(i)) ++counts[col.labels[i]];
      std::vector<std::pair<std::string, std::size_t>> freq;
      freq.reserve(counts.size());
      for (const auto& [label, count] : counts) freq.emplace_back(std::string(label), count);
      std::stable_sort(freq.begin(), freq.end(),
                       [](const auto& a, const auto& b) { return a.second > b.second; });
      if (freq.size() > 5) freq.resize(5);
      p.top_values = std::move(freq);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace forge
