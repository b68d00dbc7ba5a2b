#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/actions.hpp"
#include "forge/cleaning.hpp"
#include "forge/evaluate.hpp"
#include "forge/grounding.hpp"
#include "forge/planner.hpp"
#include "forge/routing.hpp"
#include "forge/table.hpp"

#include "json.hpp"

namespace forge {

enum class PlannerKind { Heuristic, Llm };

std::string_view to_string(PlannerKind kind);

struct RunConfig {
  std::size_t max_actions = 20;
  double min_improvement = 0.001;  // absolute delta of the primary metric
  double time_budget = 300.0;      // seconds, checked before each iteration
  std::size_t patience = 3;
  CleaningMode cleaning_mode = CleaningMode::Light;
  std::optional<std::string> time_column;
  MissingTokens missing;
  PlannerKind planner = PlannerKind::Heuristic;
  LlmConfig llm;  // used when planner == Llm
  std::uint64_t seed = 0;
  std::optional<TaskKind> task_hint;
  std::optional<std::string> target;
  std::size_t n_folds = 5;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Resolved configuration as written to run_config.json. The API key is never
// included.
nlohmann::json to_json(const RunConfig& config);

struct RunState {
  Table working_table;
  Table best_table;
  double best_metric = 0.0;
  std::size_t actions_used = 0;
  std::size_t iteration = 0;
  std::size_t non_improving_streak = 0;
  double clock = 0.0;  // seconds since the run started
  bool planner_exhausted = false;
};

enum class StopReason { MaxActions, TimeBudget, Patience, PlannerExhausted };

// "max_actions", "time_budget", "patience", "planner exhausted".
std::string_view to_string(StopReason reason);

// First matching reason in the order above, or nullopt to keep going.
std::optional<StopReason> should_stop(const RunState& state, const RunConfig& config);

struct ExperienceRecord {
  std::size_t iteration = 0;
  Plan plan;
  GroundingReport grounding;
  bool executed = false;
  double metric_before = 0.0;
  std::optional<double> metric_after;
  bool accepted = false;
  PlanOrigin planner_origin = PlanOrigin::Heuristic;
  std::string timestamp;
  double wall_time = 0.0;  // seconds spent executing and evaluating
  std::size_t features_after = 0;
  std::string note;
};

nlohmann::json to_json(const ExperienceRecord& record);

// Append-only JSON Lines file: one header record, then one record per
// iteration. Every line is flushed as soon as it is written.
class ExperienceStore {
 public:
  ExperienceStore(const std::filesystem::path& path, const nlohmann::json& header);
  void append(const ExperienceRecord& record);

 private:
  void write_line(const nlohmann::json& j);

  std::filesystem::path path_;
  std::ofstream out_;
};

// --- progress events -----------------------------------------------------

enum class EventKind { Clean, Route, Baseline, Plan, Planner, Ground, Metric, Accept, Reject, Error, Stop, Summary };

struct ProgressEvent {
  EventKind kind = EventKind::Clean;
  std::optional<std::size_t> iteration;
  std::string message;
};

// "iter 3 | ground FAIL G3: ..." for loop events, "<kind>: ..." otherwise.
std::string format_progress(const ProgressEvent& event);

using ProgressSink = std::function<void(const ProgressEvent&)>;

// --- run -----------------------------------------------------------------

struct ReportInput {
  std::string input_name;
  std::size_t n_rows = 0;
  std::optional<std::string> target;
  CleaningMode cleaning_mode = CleaningMode::Light;
  CleaningReport cleaning;
  RoutingDecision routing;
  EvalResult baseline;
  std::vector<ExperienceRecord> log;
  std::size_t features_before = 0;
  std::size_t features_after = 0;
  double best_metric = 0.0;
  StopReason stop = StopReason::PlannerExhausted;
  std::string timestamp;
  double wall_time = 0.0;
};

// Markdown with the four sections in order: (i) cleaning and feature
// operations, (ii) routing decisions, (iii) validation checks, (iv)
// performance progression; then the summary line
// "features: A → B, metric: X → Y, stop: R".
std::string render_report(const ReportInput& input);
std::string summary_line(std::size_t features_before, std::size_t features_after, double baseline, double best,
                         StopReason stop);

struct RunOptions {
  ProgressSink progress;                      // may be empty
  std::optional<std::filesystem::path> out_dir;  // no files when absent
  std::string input_name = "input";
  // Seconds since an arbitrary origin; defaults to a steady clock.
  std::function<double()> clock;
  // ISO-8601 wall-clock stamp; defaults to the current UTC time.
  std::function<std::string()> timestamp;
};

struct RunResult {
  Table cleaned_table;
  Table best_table;
  CleaningReport cleaning;
  RoutingDecision routing;
  EvalResult baseline;
  std::vector<ExperienceRecord> log;
  RunState state;
  StopReason stop = StopReason::PlannerExhausted;
  std::size_t features_before = 0;
  std::string report;
};

// Clean, route, evaluate the baseline, then iterate plan -> ground ->
// execute -> evaluate until a stop condition holds. Cleaning, routing and
// baseline failures propagate; failures inside the loop reject the iteration.
// With out_dir set, writes experience.jsonl, report.md, best_table.csv and
// run_config.json there.
RunResult run(const RunConfig& config, const Table& input, Planner& planner, const RunOptions& options = {});

std::string utc_timestamp();

}  // namespace forge
