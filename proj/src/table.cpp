#include "forge/table.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <unordered_set>

#include "forge/errors.hpp"

namespace forge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::uint8_t> flags_or_zero(std::vector<std::uint8_t> missing, std::size_t n) {
  if (missing.empty()) missing.assign(n, 0);
  return missing;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto ca = static_cast<unsigned char>(a[i]);
    const auto cb = static_cast<unsigned char>(b[i]);
    if (std::tolower(ca) != std::tolower(cb)) return false;
  }
  return true;
}

// Days since 1970-01-01 for a proleptic Gregorian date.
long long days_from_civil(long long y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

void civil_from_days(long long z, long long& y, unsigned& m, unsigned& d) {
  z += 719468;
  const long long era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<long long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

bool is_leap(long long y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(long long y, unsigned m) {
  static constexpr std::array<unsigned, 12> kDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

// Reads exactly `width` digits.
bool read_digits(std::string_view s, std::size_t& pos, std::size_t width, unsigned& out) {
  if (pos + width > s.size()) return false;
  unsigned v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<unsigned>(c - '0');
  }
  pos += width;
  out = v;
  return true;
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Numeric: return "numeric";
    case ColumnKind::Categorical: return "categorical";
    case ColumnKind::Boolean: return "boolean";
    case ColumnKind::Datetime: return "datetime";
    case ColumnKind::Text: return "text";
  }
  return "text";
}

// --- Column ----------------------------------------------------------------

std::size_t Column::missing_count() const {
  return static_cast<std::size_t>(std::count(missing.begin(), missing.end(), std::uint8_t{1}));
}

std::string Column::cell_text(std::size_t row) const {
  if (is_missing(row)) return {};
  if (has_labels()) return labels[row];
  return format_number(values[row]);
}

Column Column::numeric(std::string name, std::vector<double> values,
                       std::vector<std::uint8_t> missing) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Numeric;
  c.missing = flags_or_zero(std::move(missing), values.size());
  c.values = std::move(values);
  for (std::size_t i = 0; i < c.values.size() && i < c.missing.size(); ++i)
    if (c.missing[i]) c.values[i] = kNaN;
  return c;
}

Column Column::categorical(std::string name, std::vector<std::string> labels,
                           std::vector<std::uint8_t> missing) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Categorical;
  c.missing = flags_or_zero(std::move(missing), labels.size());
  c.labels = std::move(labels);
  return c;
}

Column Column::text(std::string name, std::vector<std::string> labels,
                    std::vector<std::uint8_t> missing) {
  Column c = categorical(std::move(name), std::move(labels), std::move(missing));
  c.kind = ColumnKind::Text;
  return c;
}

void Column::check_shape() const {
  const std::size_t n = missing.size();
  if (has_values() && values.size() != n)
    throw ContractViolation("column '" + name + "': values length differs from row count");
  if (has_labels() && labels.size() != n)
    throw ContractViolation("column '" + name + "': labels length differs from row count");
}

bool operator==(const Column& a, const Column& b) {
  if (a.name != b.name || a.kind != b.kind || a.missing != b.missing) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.missing[i]) continue;
    if (a.has_values() && a.values[i] != b.values[i]) return false;
    if (a.has_labels() && a.labels[i] != b.labels[i]) return false;
  }
  return true;
}

// --- Table -----------------------------------------------------------------

Table::Table(std::vector<Column> columns, std::optional<std::string> target,
             std::vector<std::string> provenance)
    : target_(std::move(target)), provenance_(std::move(provenance)) {
  columns_.reserve(columns.size());
  for (auto& c : columns) columns_.push_back(std::make_shared<const Column>(std::move(c)));
  validate();
}

Table::Table(std::vector<std::shared_ptr<const Column>> columns, std::optional<std::string> target,
             std::vector<std::string> provenance)
    : columns_(std::move(columns)), target_(std::move(target)), provenance_(std::move(provenance)) {
  validate();
}

void Table::validate() {
  n_rows_ = columns_.empty() ? 0 : columns_.front()->size();
  std::unordered_set<std::string_view> seen;
  for (const auto& c : columns_) {
    if (c->name.empty()) throw ContractViolation("column with empty name");
    if (!seen.insert(c->name).second)
      throw ContractViolation("duplicate column name '" + c->name + "'");
    if (c->size() != n_rows_)
      throw ContractViolation("column '" + c->name + "' has " + std::to_string(c->size()) +
                              " rows, table has " + std::to_string(n_rows_));
    c->check_shape();
  }
  if (target_ && !seen.contains(*target_))
    throw ContractViolation("target '" + *target_ + "' is not a column");
}

const Column& Table::column(std::string_view name) const {
  if (const Column* c = find(name)) return *c;
  throw ContractViolation("no column named '" + std::string(name) + "'");
}

const Column* Table::find(std::string_view name) const {
  for (const auto& c : columns_)
    if (c->name == name) return c.get();
  return nullptr;
}

std::optional<std::size_t> Table::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i]->name == name) return i;
  return std::nullopt;
}

std::vector<std::string> Table::names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c->name);
  return out;
}

std::vector<std::size_t> Table::feature_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (!is_target(columns_[i]->name)) out.push_back(i);
  return out;
}

std::size_t Table::n_features() const { return columns_.size() - (target_ ? 1 : 0); }

Table Table::with_target(std::optional<std::string> target) const {
  return Table(columns_, std::move(target), provenance_);
}

Table Table::with_column(Column column) const {
  auto cols = columns_;
  cols.push_back(std::make_shared<const Column>(std::move(column)));
  return Table(std::move(cols), target_, provenance_);
}

Table Table::with_replaced(std::size_t index, Column column) const {
  auto cols = columns_;
  cols.at(index) = std::make_shared<const Column>(std::move(column));
  return Table(std::move(cols), target_, provenance_);
}

Table Table::without(std::span<const std::string> names) const {
  std::vector<std::shared_ptr<const Column>> cols;
  for (const auto& c : columns_)
    if (std::find(names.begin(), names.end(), c->name) == names.end()) cols.push_back(c);
  auto target = target_;
  if (target && std::find(names.begin(), names.end(), *target) != names.end()) target.reset();
  return Table(std::move(cols), std::move(target), provenance_);
}

Table Table::take_rows(std::span<const std::size_t> rows) const {
  std::vector<std::shared_ptr<const Column>> cols;
  cols.reserve(columns_.size());
  for (const auto& src : columns_) {
    Column c;
    c.name = src->name;
    c.kind = src->kind;
    c.missing.reserve(rows.size());
    for (std::size_t r : rows) c.missing.push_back(src->missing.at(r));
    if (src->has_values()) {
      c.values.reserve(rows.size());
      for (std::size_t r : rows) c.values.push_back(src->values[r]);
    }
    if (src->has_labels()) {
      c.labels.reserve(rows.size());
      for (std::size_t r : rows) c.labels.push_back(src->labels[r]);
    }
    cols.push_back(std::make_shared<const Column>(std::move(c)));
  }
  return Table(std::move(cols), target_, provenance_);
}

Table Table::with_provenance(std::string descriptor) const {
  auto prov = provenance_;
  prov.push_back(std::move(descriptor));
  return Table(columns_, target_, std::move(prov));
}

bool Table::same_values(const Table& other) const {
  if (target_ != other.target_ || columns_.size() != other.columns_.size()) return false;
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (!(*columns_[i] == *other.columns_[i])) return false;
  return true;
}

// --- parsing ---------------------------------------------------------------

bool MissingTokens::matches(std::string_view cell) const {
  const auto t = trim(cell);
  return std::any_of(tokens.begin(), tokens.end(), [&](const std::string& tok) { return tok == t; });
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kSpace);
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(std::string_view cell) {
  auto s = trim(cell);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<bool> parse_bool(std::string_view cell) {
  const auto s = trim(cell);
  if (iequals(s, "true") || iequals(s, "1") || iequals(s, "yes")) return true;
  if (iequals(s, "false") || iequals(s, "0") || iequals(s, "no")) return false;
  return std::nullopt;
}

std::optional<double> parse_datetime(std::string_view cell) {
  const auto s = trim(cell);
  std::size_t pos = 0;
  unsigned year = 0, month = 0, day = 0;
  if (!read_digits(s, pos, 4, year) || pos >= s.size() || s[pos++] != '-' ||
      !read_digits(s, pos, 2, month) || pos >= s.size() || s[pos++] != '-' ||
      !read_digits(s, pos, 2, day))
    return std::nullopt;
  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) return std::nullopt;
  double seconds = static_cast<double>(days_from_civil(year, month, day)) * 86400.0;
  if (pos == s.size()) return seconds;

  if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
  ++pos;
  unsigned hh = 0, mm = 0, ss = 0;
  if (!read_digits(s, pos, 2, hh) || pos >= s.size() || s[pos++] != ':' ||
      !read_digits(s, pos, 2, mm))
    return std::nullopt;
  double frac = 0.0;
  if (pos < s.size() && s[pos] == ':') {
    ++pos;
    if (!read_digits(s, pos, 2, ss)) return std::nullopt;
    if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
      ++pos;
      double scale = 0.1;
      const std::size_t start = pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        frac += scale * (s[pos] - '0');
        scale /= 10.0;
        ++pos;
      }
      if (pos == start) return std::nullopt;
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  seconds += hh * 3600.0 + mm * 60.0 + ss + frac;

  if (pos == s.size()) return seconds;
  if (s[pos] == 'Z' && pos + 1 == s.size()) return seconds;
  if (s[pos] == '+' || s[pos] == '-') {
    const double sign = s[pos] == '+' ? 1.0 : -1.0;
    ++pos;
    unsigned oh = 0, om = 0;
    if (!read_digits(s, pos, 2, oh)) return std::nullopt;
    if (pos < s.size() && s[pos] == ':') ++pos;
    if (!read_digits(s, pos, 2, om) || pos != s.size() || oh > 23 || om > 59)
      return std::nullopt;
    return seconds - sign * (oh * 3600.0 + om * 60.0);
  }
  return std::nullopt;
}

std::string format_number(double value) {
  if (std::isnan(value)) return {};
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return std::to_string(value);
  return std::string(buf.data(), ptr);
}

std::string format_datetime(double epoch_seconds) {
  const double whole = std::floor(epoch_seconds);
  const double frac = epoch_seconds - whole;
  const auto total = static_cast<long long>(whole);
  long long days = total / 86400;
  long long rem = total % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  long long y = 0;
  unsigned m = 0, d = 0;
  civil_from_days(days, y, m, d);
  std::array<char, 64> buf{};
  if (rem == 0 && frac == 0.0) {
    std::snprintf(buf.data(), buf.size(), "%04lld-%02u-%02u", y, m, d);
    return buf.data();
  }
  std::snprintf(buf.data(), buf.size(), "%04lld-%02u-%02uT%02lld:%02lld:%02lld", y, m, d, rem / 3600,
                (rem / 60) % 60, rem % 60);
  std::string out = buf.data();
  if (frac > 0.0) {
    std::snprintf(buf.data(), buf.size(), "%.6f", frac);
    std::string f = buf.data();  // "0.xxxxxx"
    while (!f.empty() && f.back() == '0') f.pop_back();
    if (f.size() > 1) out += f.substr(1);
  }
  return out;
}

ColumnKind infer_kind(std::span<const std::string> raw, const MissingTokens& missing) {
  return infer_kind(raw, {}, missing);
}

ColumnKind infer_kind(std::span<const std::string> raw, std::span<const std::uint8_t> mask,
                      const MissingTokens& missing) {
  std::size_t present = 0, numeric = 0, dates = 0;
  bool all_bool = true;
  std::set<std::string_view> distinct;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::string& cell = raw[i];
    if ((!mask.empty() && mask[i]) || missing.matches(cell)) continue;
    ++present;
    if (parse_number(cell)) ++numeric;
    if (all_bool && !parse_bool(cell)) all_bool = false;
    if (parse_datetime(cell)) ++dates;
    distinct.insert(cell);
  }
  if (present == 0) return ColumnKind::Text;
  const double m = static_cast<double>(present);
  if (static_cast<double>(numeric) >= 0.99 * m) return ColumnKind::Numeric;
  if (all_bool) return ColumnKind::Boolean;
  if (static_cast<double>(dates) >= 0.99 * m) return ColumnKind::Datetime;
  const double cutoff = std::max(20.0, 0.05 * static_cast<double>(raw.size()));
  if (static_cast<double>(distinct.size()) <= cutoff) return ColumnKind::Categorical;
  return ColumnKind::Text;
}

Column build_column(std::string name, std::span<const std::string> raw,
                    const MissingTokens& missing) {
  return build_column(std::move(name), raw, infer_kind(raw, missing), missing);
}

Column build_column(std::string name, std::span<const std::string> raw, ColumnKind kind,
                    const MissingTokens& missing) {
  return build_column(std::move(name), raw, {}, kind, missing);
}

Column build_column(std::string name, std::span<const std::string> raw,
                    std::span<const std::uint8_t> mask, ColumnKind kind,
                    const MissingTokens& missing) {
  Column c;
  c.name = std::move(name);
  c.kind = kind;
  const std::size_t n = raw.size();
  c.missing.assign(n, 0);
  if (c.has_values()) c.values.assign(n, kNaN);
  if (c.has_labels()) c.labels.assign(n, std::string{});
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& cell = raw[i];
    if ((!mask.empty() && mask[i]) || missing.matches(cell)) {
      c.missing[i] = 1;
      continue;
    }
    std::optional<double> v;
    switch (kind) {
      case ColumnKind::Numeric: v = parse_number(cell); break;
      case ColumnKind::Boolean:
        if (auto b = parse_bool(cell)) v = *b ? 1.0 : 0.0;
        break;
      case ColumnKind::Datetime: v = parse_datetime(cell); break;
      case ColumnKind::Categorical:
      case ColumnKind::Text: v = 0.0; break;
    }
    if (!v) {
      c.missing[i] = 1;
      continue;
    }
    if (c.has_values()) c.values[i] = *v;
    if (c.has_labels()) c.labels[i] = cell;
  }
  return c;
}

}  // namespace forge
