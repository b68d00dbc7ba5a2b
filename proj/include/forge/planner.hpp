#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "forge/actions.hpp"
#include "forge/profile.hpp"
#include "forge/routing.hpp"

namespace forge {

// What the planner remembers of one past iteration. Metadata only.
struct HistoryDigest {
  std::size_t iteration = 0;
  std::vector<std::string> actions;  // canonical JSON, one per action
  bool admissible = false;
  bool accepted = false;
  std::optional<double> delta;  // metric_after - metric_before when executed
  std::string failure;          // first grounding failure, e.g. "G3: division by zero in div(a,b)"
};

struct PlannerContext {
  TaskKind task = TaskKind::Classification;
  std::vector<ColumnProfile> profiles;
  std::size_t n_rows = 0;
  double baseline_metric = 0.0;
  double best_metric = 0.0;
  std::vector<HistoryDigest> history;  // ordered by iteration
  std::size_t iteration = 0;
  std::size_t remaining_actions = 0;
};

// Identity of an action with its output names blanked, so a retried action
// under a fresh name still counts as attempted.
std::string action_key(const Action& action);

// Deterministic rule-based planner, a pure function of (ctx, seed). Scans
//   H1 log1p on numeric columns with |skewness| > 2 and min > -1,
//   H2 mul over pairs of the top-5 target-correlated numeric columns,
//   H3 select_keep_top_k(ceil(F / 2)) when F > 2 * ceil(sqrt(n_rows)),
//   H4 zscore on unnormalized numeric columns,
//   H5 generate_polynomial over the top-3 variance numeric columns,
// in order until three actions not attempted before are collected. Each rule
// contributes at most one action per plan, its best-ranked candidate that was
// not attempted before and grounds. A selected keep action runs first and the
// other actions are limited to its surviving columns. nullopt signals that
// no candidate remains.
std::optional<Plan> plan_heuristic(const PlannerContext& ctx, std::uint64_t seed);

// --- LLM planner -----------------------------------------------------------

// Sends a request body, returns the response body. Throws TransportError when
// the endpoint cannot be reached, times out or answers with a non-2xx status.
using LlmTransport = std::function<std::string(const std::string& request_body)>;

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LlmConfig {
  std::string endpoint;  // full chat-completions URL
  std::string model;
  std::string api_key;
  double temperature = 0.0;
  std::chrono::seconds timeout{30};
  std::size_t max_retries = 2;
};

// HTTP POST transport built on cpp-httplib.
LlmTransport http_transport(const LlmConfig& config);

// The versioned prompt template with the context filled in.
std::string render_prompt(const PlannerContext& ctx);
inline constexpr const char* kPromptVersion = "planner_prompt_v1";

// Extracts the first JSON array from free text and validates every element
// as an action. Throws ParseError with a message suitable for the retry
// prompt.
std::vector<Action> parse_plan_reply(const std::string& content);

struct PlannerOutcome {
  std::optional<Plan> plan;  // nullopt: planner exhausted
  std::string note;          // fallbacks, retries, transport failures
};

// Asks the model, retrying with the parse error appended up to
// config.max_retries times, and falls back to plan_heuristic on transport
// failure or exhausted retries. Plans are capped at kMaxPlanActions.
PlannerOutcome plan_llm(const PlannerContext& ctx, const LlmConfig& config, const LlmTransport& transport,
                        std::uint64_t seed);

// --- interface used by the controller ----------------------------------------

class Planner {
 public:
  virtual ~Planner() = default;
  virtual PlannerOutcome next(const PlannerContext& ctx) = 0;
};

std::unique_ptr<Planner> make_heuristic_planner(std::uint64_t seed);
std::unique_ptr<Planner> make_llm_planner(LlmConfig config, LlmTransport transport, std::uint64_t seed);

}  // namespace forge
