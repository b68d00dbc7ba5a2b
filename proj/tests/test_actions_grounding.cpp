#include <cmath>

#include "doctest.h"
#include "forge/actions.hpp"
#include "forge/errors.hpp"
#include "forge/grounding.hpp"
#include "forge/profile.hpp"
#include "support.hpp"

using namespace forge;
using doctest::Approx;

namespace {

Plan plan_of(std::vector<Action> actions) { return Plan{std::move(actions), PlanOrigin::Heuristic, 1}; }

GroundingReport ground(const Plan& plan, const Table& t) { return ground_plan(plan, profile(t), t.target()); }

std::vector<SchemaEntry> schema_of(const Table& t) {
  std::vector<SchemaEntry> out;
  for (std::size_t i = 0; i < t.n_cols(); ++i) out.push_back({t.column(i).name, t.column(i).kind});
  return out;
}

}  // namespace

TEST_CASE("action wire format round-trips") {
  const std::vector<Action> actions{
      SelectDrop{{"a", "b"}},
      SelectKeepTopK{3, KeepCriterion::Variance},
      TransformUnary{UnaryOp::BinEqualWidth, "x", "x_bin", 4},
      TransformUnary{UnaryOp::Log1p, "x", "x_log", 0},
      TransformBinary{BinaryOp::Div, "a", "b", "r"},
      GeneratePolynomial{2, {"a", "b"}, "p"},
      GenerateGroupAgg{"g", AggOp::Count, "x", "n"},
  };
  for (const auto& a : actions) {
    CHECK(action_from_json(to_json(a)) == a);
    CHECK(canonical(a) == to_json(a).dump());
  }
  const Plan p{actions, PlanOrigin::Llm, 4};
  CHECK(plan_from_json(to_json(p)) == p);
}

TEST_CASE("action parsing is strict") {
  using nlohmann::json;
  const auto ok = json::parse(R"({"op":"log1p","args":{"column":"age","out_name":"age_log"}})");
  CHECK(std::get<TransformUnary>(action_from_json(ok)).column == "age");
  CHECK_THROWS_AS(action_from_json(json::parse(R"({"op":"exp","args":{"column":"a","out_name":"b"}})")), ParseError);
  CHECK_THROWS_AS(action_from_json(json::parse(R"({"op":"log1p","args":{"column":"a"}})")), ParseError);
  CHECK_THROWS_AS(action_from_json(json::parse(R"({"op":"log1p","args":{"column":"a","out_name":"b","x":1}})")),
                  ParseError);
  CHECK_THROWS_AS(action_from_json(json::parse(R"({"op":"select_keep_top_k","args":{"k":"3","criterion":"variance"}})")),
                  ParseError);
  CHECK_THROWS_AS(action_from_json(json::parse(R"(["log1p"])")), ParseError);
}

TEST_CASE("describe_action templates") {
  CHECK(describe_action(SelectDrop{{"f3"}}) == "Dropped column f3.");
  CHECK(describe_action(TransformBinary{BinaryOp::Div, "a", "b", "r"}) == "Created r = a / b.");
  CHECK(describe_action(SelectKeepTopK{10, KeepCriterion::TargetCorrelation}) ==
        "Kept the 10 features most correlated with the target.");
  CHECK(describe_action(TransformBinary{BinaryOp::Mul, "a", "b", "r"}) !=
        describe_action(TransformBinary{BinaryOp::Mul, "b", "a", "r"}));
}

TEST_CASE("polynomial output names") {
  const auto names = polynomial_output_names(GeneratePolynomial{2, {"a", "b"}, "p"});
  CHECK(names == std::vector<std::string>{"p_a_x_a", "p_a_x_b", "p_b_x_b"});
}

TEST_CASE("grounding codes") {
  const Table t = test::csv("a,b,g,y\n1,0,u,1\n2,3,v,0\n3,4,u,1\n-4,5,v,0\n", "y");

  auto first_code = [&](Action a) {
    const auto r = ground(plan_of({std::move(a)}), t);
    REQUIRE(r.verdicts.size() == 1);
    return r.verdicts[0].code;
  };

  CHECK(first_code(TransformBinary{BinaryOp::Div, "a", "b", "r"}) == GroundingCode::G3);
  CHECK(first_code(TransformUnary{UnaryOp::Reciprocal, "b", "rb", 0}) == GroundingCode::G3);
  CHECK(first_code(TransformBinary{BinaryOp::Div, "b", "a", "r"}) == std::nullopt);
  CHECK(first_code(TransformUnary{UnaryOp::Log1p, "zz", "o", 0}) == GroundingCode::G1);
  CHECK(first_code(TransformUnary{UnaryOp::Log1p, "g", "o", 0}) == GroundingCode::G2);
  CHECK(first_code(TransformUnary{UnaryOp::Log1p, "a", "o", 0}) == GroundingCode::G4);
  CHECK(first_code(TransformUnary{UnaryOp::Sqrt, "a", "o", 0}) == GroundingCode::G4);
  CHECK(first_code(TransformUnary{UnaryOp::Sqrt, "b", "o", 0}) == std::nullopt);
  CHECK(first_code(TransformUnary{UnaryOp::Square, "a", "b", 0}) == GroundingCode::G5);
  CHECK(first_code(TransformUnary{UnaryOp::Square, "a", "", 0}) == GroundingCode::G5);
  CHECK(first_code(TransformUnary{UnaryOp::Square, "y", "y2", 0}) == GroundingCode::G6);
  CHECK(first_code(SelectDrop{{"y"}}) == GroundingCode::G6);
  CHECK(first_code(SelectDrop{{"a", "b", "g"}}) == GroundingCode::G7);
  CHECK(first_code(GenerateGroupAgg{"a", AggOp::Mean, "b", "m"}) == GroundingCode::G2);
  CHECK(first_code(GenerateGroupAgg{"g", AggOp::Mean, "b", "m"}) == std::nullopt);
}

TEST_CASE("plan admissibility and evolving schema") {
  const Table t = test::csv("x,y\n1,2\n2,5\n3,4\n");
  const Plan p = plan_of({TransformUnary{UnaryOp::Zscore, "x", "x_z", 0}, TransformBinary{BinaryOp::Mul, "x_z", "y", "xy"}});
  const auto r = ground(p, t);
  CHECK(r.plan_admissible);
  CHECK(r.failures() == 0);
  const Table out = execute_plan(p, t);
  CHECK(r.predicted_schema == schema_of(out));
  CHECK(out.provenance().size() == t.provenance().size() + 2);

  const Plan bad = plan_of({TransformBinary{BinaryOp::Mul, "x_z", "y", "xy"}, TransformUnary{UnaryOp::Zscore, "x", "x_z", 0}});
  const auto rb = ground(bad, t);
  CHECK_FALSE(rb.plan_admissible);
  CHECK(rb.failures() == 1);
  CHECK(rb.verdicts[0].code == GroundingCode::G1);
  CHECK(rb.verdicts[1].pass);
  CHECK_THROWS_AS(execute_plan(bad, t), ContractViolation);
}

TEST_CASE("executor semantics") {
  const Table t({test::num("x", {1, 2, 3}), test::num("c", {5, 5, 5}), test::num("p", {0, 1, 3})});

  SUBCASE("zscore") {
    const Table out = execute_plan(plan_of({TransformUnary{UnaryOp::Zscore, "x", "z", 0}}), t);
    const auto& z = out.column("z").values;
    CHECK(z[0] == Approx(-1.0));
    CHECK(z[1] == Approx(0.0));
    CHECK(z[2] == Approx(1.0));
    const Table cz = execute_plan(plan_of({TransformUnary{UnaryOp::Zscore, "c", "z", 0}}), t);
    CHECK(cz.column("z").values == std::vector<double>{0, 0, 0});
  }
  SUBCASE("minmax constant column") {
    const Table out = execute_plan(plan_of({TransformUnary{UnaryOp::Minmax, "c", "m", 0}}), t);
    CHECK(out.column("m").values == std::vector<double>{0, 0, 0});
  }
  SUBCASE("log1p") {
    const Table out = execute_plan(plan_of({TransformUnary{UnaryOp::Log1p, "p", "l", 0}}), t);
    CHECK(out.column("l").values[2] == Approx(std::log(4.0)));
  }
  SUBCASE("polynomial") {
    const Table out = execute_plan(plan_of({GeneratePolynomial{2, {"x", "p"}, "q"}}), t);
    CHECK(out.n_cols() == t.n_cols() + 3);
    CHECK(out.column("q_x_x_p").values == std::vector<double>{0, 2, 9});
    CHECK(out.column("q_p_x_p").values == std::vector<double>{0, 1, 9});
  }
  SUBCASE("bins") {
    const Table out = execute_plan(plan_of({TransformUnary{UnaryOp::BinEqualWidth, "x", "b", 2}}), t);
    const auto& b = out.column("b");
    CHECK(b.kind == ColumnKind::Categorical);
    CHECK(b.labels.front() == "b0");
    CHECK(b.labels.back() == "b1");
  }
  SUBCASE("purity") {
    const Table copy = t;
    (void)execute_plan(plan_of({SelectDrop{{"x"}}, TransformUnary{UnaryOp::Square, "p", "p2", 0}}), t);
    CHECK(t.same_values(copy));
    CHECK(t.n_cols() == 3);
  }
}

TEST_CASE("keep top k by target correlation, ties by column order") {
  const Table t({test::num("a", {1, 2, 3, 4}), test::num("b", {4, 1, 3, 2}), test::num("c", {2, 4, 6, 8}),
                 test::num("y", {1, 2, 3, 4})},
                std::string("y"));
  const Plan p = plan_of({SelectKeepTopK{1, KeepCriterion::TargetCorrelation}});
  const auto r = ground(p, t);
  REQUIRE(r.plan_admissible);
  const Table out = execute_plan(p, t);
  CHECK(out.names() == std::vector<std::string>{"a", "y"});
  CHECK(r.predicted_schema == schema_of(out));
}

TEST_CASE("group aggregation") {
  const Table t = test::csv("g,v\nu,1\nv,10\nu,3\n");
  const Table out = execute_plan(plan_of({GenerateGroupAgg{"g", AggOp::Mean, "v", "m"},
                                          GenerateGroupAgg{"g", AggOp::Count, "v", "n"}}),
                                 t);
  CHECK(out.column("m").values == std::vector<double>{2, 10, 2});
  CHECK(out.column("n").values == std::vector<double>{2, 1, 2});
}
