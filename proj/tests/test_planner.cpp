#include <cmath>
#include <random>

#include "doctest.h"
#include "forge/errors.hpp"
#include "forge/grounding.hpp"
#include "forge/planner.hpp"
#include "forge/profile.hpp"
#include "forge/random.hpp"
#include "support.hpp"

using namespace forge;
using nlohmann::json;

namespace {

PlannerContext context_for(const Table& t, TaskKind task) {
  PlannerContext ctx;
  ctx.task = task;
  ctx.profiles = profile(t);
  ctx.n_rows = t.n_rows();
  ctx.iteration = 1;
  ctx.remaining_actions = 20;
  return ctx;
}

Table skewed_table() {
  std::mt19937_64 rng(3);
  std::vector<double> s, x, y;
  for (int i = 0; i < 200; ++i) {
    const double u = unit_uniform(rng);
    s.push_back(std::exp(6 * u * u * u));
    x.push_back(unit_uniform(rng));
    y.push_back(x.back() + 0.1 * unit_uniform(rng));
  }
  return Table({test::num("s", s), test::num("x", x), test::num("y", y)}, std::string("y"));
}

Table wide_table(std::size_t features, std::size_t rows) {
  std::mt19937_64 rng(9);
  std::vector<Column> cols;
  std::vector<double> y(rows);
  for (auto& v : y) v = unit_uniform(rng);
  for (std::size_t f = 0; f < features; ++f) {
    std::vector<double> v(rows);
    for (std::size_t r = 0; r < rows; ++r) v[r] = y[r] * double(f % 5) + unit_uniform(rng);
    cols.push_back(test::num("f" + std::to_string(f), v));
  }
  cols.push_back(test::num("y", y));
  return Table(std::move(cols), std::string("y"));
}

bool contains_unary(const Plan& p, UnaryOp op, const std::string& column) {
  for (const auto& a : p.actions)
    if (const auto* u = std::get_if<TransformUnary>(&a); u && u->op == op && u->column == column) return true;
  return false;
}

std::string chat_reply(const std::string& content) {
  return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}}.dump();
}

LlmConfig llm_config() {
  LlmConfig c;
  c.endpoint = "http://localhost:1/v1/chat/completions";
  c.model = "m";
  c.api_key = "k";
  return c;
}

void record(PlannerContext& ctx, const Plan& p) {
  HistoryDigest h;
  h.iteration = ctx.history.size() + 1;
  for (const auto& a : p.actions) h.actions.push_back(canonical(a));
  h.admissible = true;
  ctx.history.push_back(h);
}

}  // namespace

TEST_CASE("H1 proposes log1p on a skewed column") {
  const Table t = skewed_table();
  const PlannerContext ctx = context_for(t, TaskKind::Regression);
  REQUIRE(std::abs(*ctx.profiles[0].skewness) > 2);
  const auto plan = plan_heuristic(ctx, 1);
  REQUIRE(plan);
  CHECK(contains_unary(*plan, UnaryOp::Log1p, "s"));
  CHECK(plan->actions.size() <= 3);
}

TEST_CASE("H3 keeps half of 60 features at 400 rows") {
  const Table t = wide_table(60, 400);
  const auto plan = plan_heuristic(context_for(t, TaskKind::Regression), 1);
  REQUIRE(plan);
  REQUIRE_FALSE(plan->actions.empty());
  const auto* keep = std::get_if<SelectKeepTopK>(&plan->actions.front());
  REQUIRE(keep);
  CHECK(keep->k == 30);
  CHECK(keep->criterion == KeepCriterion::TargetCorrelation);
}

TEST_CASE("H3 stays quiet below the threshold") {
  const Table t = wide_table(40, 400);
  const auto plan = plan_heuristic(context_for(t, TaskKind::Regression), 1);
  REQUIRE(plan);
  for (const auto& a : plan->actions) CHECK_FALSE(std::holds_alternative<SelectKeepTopK>(a));
}

TEST_CASE("heuristic plans are deterministic, admissible and round-trip") {
  const Table t = skewed_table();
  const PlannerContext ctx = context_for(t, TaskKind::Regression);
  const auto a = plan_heuristic(ctx, 42);
  const auto b = plan_heuristic(ctx, 42);
  REQUIRE(a);
  CHECK(*a == *b);
  CHECK(plan_from_json(to_json(*a)) == *a);
  CHECK(ground_plan(*a, ctx.profiles, t.target()).plan_admissible);
}

TEST_CASE("exhaustion once every candidate was attempted") {
  const Table t = skewed_table();
  PlannerContext ctx = context_for(t, TaskKind::Regression);
  std::size_t plans = 0;
  while (auto p = plan_heuristic(ctx, 1)) {
    REQUIRE(plans < 200);
    record(ctx, *p);
    ++plans;
  }
  CHECK(plans > 0);
  CHECK_FALSE(plan_heuristic(ctx, 1).has_value());
}

TEST_CASE("action_key ignores output names") {
  CHECK(action_key(TransformUnary{UnaryOp::Log1p, "a", "a_log1p", 0}) ==
        action_key(TransformUnary{UnaryOp::Log1p, "a", "a_log1p_2", 0}));
  CHECK(action_key(TransformUnary{UnaryOp::Log1p, "a", "o", 0}) !=
        action_key(TransformUnary{UnaryOp::Sqrt, "a", "o", 0}));
}

TEST_CASE("reply parsing") {
  const auto one = parse_plan_reply(R"([{"op":"log1p","args":{"column":"age","out_name":"age_log"}}])");
  REQUIRE(one.size() == 1);
  CHECK(std::get<TransformUnary>(one[0]).out_name == "age_log");
  const auto embedded = parse_plan_reply(
      "Here you go:\n```json\n[{\"op\":\"select_drop\",\"args\":{\"columns\":[\"a]\"]}}]\n```\nthanks [1]");
  REQUIRE(embedded.size() == 1);
  CHECK(std::get<SelectDrop>(embedded[0]).columns == std::vector<std::string>{"a]"});
  CHECK_THROWS_AS(parse_plan_reply("I would log the age column."), ParseError);
  CHECK_THROWS_AS(parse_plan_reply("[]"), ParseError);
  CHECK_THROWS_AS(parse_plan_reply(R"([{"op":"explode","args":{}}])"), ParseError);
}

TEST_CASE("prompt carries schema and vocabulary, never rows") {
  const Table t = test::csv("secret_col,y\n123456.5,1\n2,2\n3,3\n", "y");
  const std::string prompt = render_prompt(context_for(t, TaskKind::Regression));
  CHECK(prompt.find("secret_col") != std::string::npos);
  CHECK(prompt.find("select_keep_top_k") != std::string::npos);
  CHECK(prompt.find("generate_group_agg") != std::string::npos);
  CHECK(prompt.find("JSON array") != std::string::npos);
  CHECK(prompt.find("{{") == std::string::npos);
}

TEST_CASE("llm planner") {
  const Table t = skewed_table();
  const PlannerContext ctx = context_for(t, TaskKind::Regression);
  std::vector<std::string> requests;

  SUBCASE("valid reply") {
    auto transport = [&](const std::string& body) {
      requests.push_back(body);
      return chat_reply(R"([{"op":"log1p","args":{"column":"s","out_name":"s_log"}}])");
    };
    const auto out = plan_llm(ctx, llm_config(), transport, 1);
    REQUIRE(out.plan);
    CHECK(out.plan->origin == PlanOrigin::Llm);
    REQUIRE(out.plan->actions.size() == 1);
    CHECK(out.note.empty());
    REQUIRE(requests.size() == 1);
    const json body = json::parse(requests[0]);
    CHECK(body["model"] == "m");
    CHECK(body["temperature"] == 0.0);
    CHECK(body["messages"][0]["role"] == "user");
  }
  SUBCASE("prose falls back after retries") {
    auto transport = [&](const std::string& body) {
      requests.push_back(body);
      return chat_reply("I suggest taking the log of s.");
    };
    const auto out = plan_llm(ctx, llm_config(), transport, 1);
    CHECK(requests.size() == 3);
    REQUIRE(out.plan);
    CHECK(out.plan->origin == PlanOrigin::Heuristic);
    CHECK(*out.plan == *plan_heuristic(ctx, 1));
    CHECK(out.note.find("after 3 attempts") != std::string::npos);
    const json last = json::parse(requests.back());
    CHECK(last["messages"].size() == 5);
    CHECK(last["messages"][1]["role"] == "assistant");
  }
  SUBCASE("twelve actions are truncated to eight") {
    json arr = json::array();
    for (int i = 0; i < 12; ++i)
      arr.push_back({{"op", "square"}, {"args", {{"column", "x"}, {"out_name", "x_sq" + std::to_string(i)}}}});
    auto transport = [&](const std::string&) { return chat_reply(arr.dump()); };
    const auto out = plan_llm(ctx, llm_config(), transport, 1);
    REQUIRE(out.plan);
    CHECK(out.plan->actions.size() == 8);
    CHECK(std::get<TransformUnary>(out.plan->actions[7]).out_name == "x_sq7");
  }
  SUBCASE("transport failure falls back at once") {
    auto transport = [&](const std::string& body) -> std::string {
      requests.push_back(body);
      throw TransportError("connection refused");
    };
    const auto out = plan_llm(ctx, llm_config(), transport, 1);
    CHECK(requests.size() == 1);
    REQUIRE(out.plan);
    CHECK(out.plan->origin == PlanOrigin::Heuristic);
    CHECK(out.note.find("connection refused") != std::string::npos);
  }
  SUBCASE("retry succeeds") {
    auto transport = [&](const std::string& body) {
      requests.push_back(body);
      if (requests.size() == 1) return chat_reply("[{\"op\":\"log1p\"}]");
      return chat_reply(R"([{"op":"sqrt","args":{"column":"x","out_name":"x_sqrt"}}])");
    };
    const auto out = plan_llm(ctx, llm_config(), transport, 1);
    REQUIRE(out.plan);
    CHECK(out.plan->origin == PlanOrigin::Llm);
    CHECK(out.note.find("attempt 2") != std::string::npos);
    const json second = json::parse(requests[1]);
    CHECK(second["messages"].back()["content"].get<std::string>().find("could not be used") != std::string::npos);
  }
}

TEST_CASE("http transport rejects bad endpoints") {
  LlmConfig c = llm_config();
  c.endpoint = "localhost:8080";
  CHECK_THROWS_AS(http_transport(c), ConfigError);
  c.endpoint = "http://127.0.0.1:1/v1/chat";
  c.timeout = std::chrono::seconds(1);
  const auto t = http_transport(c);
  CHECK_THROWS_AS(t("{}"), TransportError);
}
