#include <cmath>
#include <random>

#include "doctest.h"
#include "forge/cleaning.hpp"
#include "forge/errors.hpp"
#include "forge/profile.hpp"
#include "forge/routing.hpp"
#include "support.hpp"

using namespace forge;
using doctest::Approx;
using test::kMissing;

namespace {

const ColumnProfile& find(const std::vector<ColumnProfile>& ps, const std::string& name) {
  for (const auto& p : ps)
    if (p.name == name) return p;
  throw std::runtime_error("no profile " + name);
}

}  // namespace

TEST_CASE("profile statistics") {
  const Table t({test::num("a", {1, 2, 3}), test::num("b", {1, kMissing, 3}), test::num("c", {0, 1, 2})});
  const auto ps = profile(t);
  const auto& a = find(ps, "a");
  CHECK(*a.mean == 2.0);
  CHECK(*a.stddev == 1.0);  // sample convention
  CHECK(*a.skewness == Approx(0.0));
  CHECK(a.integral);
  const auto& b = find(ps, "b");
  CHECK(b.missing_rate == Approx(1.0 / 3.0));
  CHECK(*b.mean == 2.0);
  const auto& c = find(ps, "c");
  CHECK(c.has_zero);
  CHECK(c.has_nonpositive);
  CHECK(find(ps, "a").has_nonpositive == false);
}

TEST_CASE("skewness against a direct computation") {
  const std::vector<double> v{1, 1, 2, 3, 10, 40};
  double m = 0;
  for (double x : v) m += x / 6;
  double m2 = 0, m3 = 0;
  for (double x : v) {
    m2 += (x - m) * (x - m) / 6;
    m3 += (x - m) * (x - m) * (x - m) / 6;
  }
  const auto ps = profile(Table({test::num("x", v)}));
  CHECK(*ps[0].skewness == Approx(m3 / std::pow(m2, 1.5)).epsilon(1e-12));
}

TEST_CASE("categorical top values and target correlation") {
  const Table t = test::csv("k,x,y\nb,1,2\na,2,4\nb,3,6\nc,4,8.5\n", "y");
  const auto ps = profile(t);
  const auto& k = find(ps, "k");
  REQUIRE(k.top_values.size() == 3);
  CHECK(k.top_values[0] == std::pair<std::string, std::size_t>{"b", 2});
  CHECK(k.top_values[1].first == "a");
  CHECK(*find(ps, "x").target_correlation > 0.99);
  CHECK(find(ps, "y").is_target);
  CHECK_FALSE(find(ps, "y").target_correlation);
}

TEST_CASE("percentile") {
  const std::vector<double> v{4, 1, 3, 2};
  CHECK(percentile(v, 0.5) == 2.5);
  CHECK(percentile(v, 0.0) == 1.0);
  CHECK(percentile(v, 1.0) == 4.0);
  CHECK(percentile(std::vector<double>{7}, 0.3) == 7.0);
  CHECK_THROWS_AS(percentile(std::vector<double>{}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(percentile(v, 1.5), std::invalid_argument);
}

TEST_CASE("light cleaning imputes the median") {
  const Table t({test::num("a", {1, kMissing, 3}), test::num("y", {0, 1, 0})}, "y");
  const auto r = clean(t, CleaningMode::Light);
  CHECK(r.table.column("a").values == std::vector<double>{1, 2, 3});
  std::size_t imputed = 0;
  for (const auto& s : r.report.steps)
    if (s.name == "impute") imputed = s.cells_changed;
  CHECK(imputed == 1);
}

TEST_CASE("categorical mode imputation breaks ties lexicographically") {
  const Table t = test::csv("k,y\nb,1\na,2\n,3\n", "y");
  const auto r = clean(t, CleaningMode::Light);
  CHECK(r.table.column("k").labels[2] == "a");
}

TEST_CASE("rows with a missing target are dropped, the target is never touched") {
  const Table t = test::csv("x,y\n1, a \n2,\n3,b\n", "y");
  const auto r = clean(t, CleaningMode::Light);
  CHECK(r.table.n_rows() == 2);
  CHECK(r.report.rows_dropped == 1);
  CHECK(r.table.column("y").labels[0] == " a ");
  CHECK(r.table.target() == std::optional<std::string>("y"));
}

TEST_CASE("aggressive cleaning drops constant columns and duplicates") {
  const Table t = test::csv("c,x,y\n5,1,0\n5,1,0\n5,2,1\n5,3,1\n", "y");
  const auto r = clean(t, CleaningMode::Aggressive);
  CHECK_FALSE(r.table.find("c"));
  CHECK(std::find(r.report.columns_dropped.begin(), r.report.columns_dropped.end(), "c") !=
        r.report.columns_dropped.end());
  CHECK(r.table.n_rows() == 3);
}

TEST_CASE("aggressive cleaning is idempotent") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(60), b(60), y(60);
    for (std::size_t i = 0; i < 60; ++i) {
      a[i] = rng() % 7 == 0 ? kMissing : static_cast<double>(rng() % 1000) - 500.0;
      b[i] = static_cast<double>(rng() % 4);
      y[i] = static_cast<double>(rng() % 2);
    }
    a[0] = 1e9;
    const Table t({test::num("a", a), test::num("b", b), test::num("y", y)}, "y");
    const Table once = clean(t, CleaningMode::Aggressive).table;
    const Table twice = clean(once, CleaningMode::Aggressive).table;
    CHECK(once.same_values(twice));
  }
}

TEST_CASE("timeseries fills forward then backward in time order") {
  const Table t({test::num("t", {2, 1, 3, 4}), test::num("v", {5, kMissing, kMissing, 7})});
  const auto r = clean(t, CleaningMode::TimeSeries, "t");
  // Ordered by time: [missing, 5, missing, 7].
  CHECK(r.table.column("t").values == std::vector<double>{1, 2, 3, 4});
  CHECK(r.table.column("v").values == std::vector<double>{5, 5, 5, 7});
  CHECK_THROWS_AS(clean(t, CleaningMode::TimeSeries, "nope"), CleaningError);
}

TEST_CASE("cleaning errors") {
  CHECK_THROWS_AS(clean(test::csv("x,y\n1,\n2,\n", "y"), CleaningMode::Light), CleaningError);
  CHECK_THROWS_AS(clean(test::csv("y\n1\n2\n", "y"), CleaningMode::Light), CleaningError);
}

TEST_CASE("routing rules") {
  const Table t = test::csv("x,c,r\n1,0,0.5\n2,1,1.25\n3,0,2.75\n", "c");
  CHECK(route_task(profile(t), std::string("c")).rule_fired == "R3");
  CHECK(route_task(profile(t), std::string("c")).task == TaskKind::Classification);
  CHECK(route_task(profile(t), std::nullopt).task == TaskKind::Unsupervised);
  CHECK(route_task(profile(t), std::nullopt).rule_fired == "R2");
  CHECK(route_task(profile(t), std::string("r"), TaskKind::Classification).rule_fired == "R1");
  CHECK_THROWS_AS(route_task(profile(t), std::string("missing")), RoutingError);

  std::vector<double> y(412);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<double>(i) + 0.5;
  const Table reg({test::num("x", y), test::num("y", y)}, "y");
  const auto d = route_task(profile(reg), std::string("y"));
  CHECK(d.task == TaskKind::Regression);
  CHECK(d.rule_fired == "R4");
}
