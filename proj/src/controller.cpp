#include "forge/controller.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <sstream>

#include "forge/csv.hpp"
#include "forge/errors.hpp"
#include "forge/profile.hpp"

namespace forge {

namespace {

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string signed_fixed(double v, int digits) { return (v >= 0 ? "+" : "") + fixed(v, digits); }

std::string join(const std::vector<std::string>& xs, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

std::string plan_signatures(const Plan& plan) {
  std::vector<std::string> sigs;
  for (const auto& a : plan.actions) sigs.push_back(action_signature(a));
  return join(sigs, ", ");
}

nlohmann::json to_json(const GroundingReport& g) {
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : g.verdicts) {
    nlohmann::json j = {{"pass", v.pass}};
    if (v.code) j["code"] = std::string(to_string(*v.code));
    if (!v.message.empty()) j["message"] = v.message;
    verdicts.push_back(j);
  }
  nlohmann::json schema = nlohmann::json::array();
  for (const auto& e : g.predicted_schema) schema.push_back({{"name", e.name}, {"kind", std::string(to_string(e.kind))}});
  return {{"plan_admissible", g.plan_admissible}, {"verdicts", verdicts}, {"predicted_schema", schema}};
}

std::string first_failure(const GroundingReport& g) {
  for (const auto& v : g.verdicts)
    if (!v.pass) return std::string(to_string(*v.code)) + ": " + v.message;
  return {};
}

HistoryDigest digest(const ExperienceRecord& r) {
  HistoryDigest d;
  d.iteration = r.iteration;
  for (const auto& a : r.plan.actions) d.actions.push_back(canonical(a));
  d.admissible = r.grounding.plan_admissible;
  d.accepted = r.accepted;
  if (r.metric_after) d.delta = *r.metric_after - r.metric_before;
  d.failure = d.admissible ? r.note : first_failure(r.grounding);
  return d;
}

std::string stop_detail(StopReason reason, const RunState& state, const RunConfig& config) {
  switch (reason) {
    case StopReason::MaxActions:
      return std::to_string(state.actions_used) + " of " + std::to_string(config.max_actions) + " actions used";
    case StopReason::TimeBudget: return "budget " + format_number(config.time_budget) + " s";
    case StopReason::Patience: return std::to_string(state.non_improving_streak) + " non-improving iterations";
    case StopReason::PlannerExhausted: return "no untried candidates";
  }
  return {};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::string decision_of(const ExperienceRecord& r) {
  if (!r.grounding.plan_admissible) return "invalid";
  if (!r.metric_after) return "error";
  return r.accepted ? "accept" : "reject";
}

std::string escape_cell(std::string s) {
  for (std::size_t pos = 0; (pos = s.find('|', pos)) != std::string::npos; pos += 2) s.replace(pos, 1, "\\|");
  return s;
}

}  // namespace

std::string_view to_string(PlannerKind kind) { return kind == PlannerKind::Llm ? "llm" : "heuristic"; }

void RunConfig::validate() const {
  if (max_actions < 1) throw ConfigError("max_actions must be at least 1");
  if (!(time_budget > 0.0) || !std::isfinite(time_budget)) throw ConfigError("time_budget must be a positive number");
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (!std::isfinite(min_improvement)) throw ConfigError("min_improvement must be finite");
  if (n_folds < 2) throw ConfigError("n_folds must be at least 2");
  if (task_hint && *task_hint != TaskKind::Unsupervised && !target)
    throw ConfigError("task " + std::string(to_string(*task_hint)) + " needs a target column");
  if (cleaning_mode == CleaningMode::TimeSeries && !time_column)
    throw ConfigError("timeseries cleaning needs a time column");
  if (planner == PlannerKind::Llm) {
    if (llm.endpoint.empty()) throw ConfigError("the llm planner needs an endpoint");
    if (llm.model.empty()) throw ConfigError("the llm planner needs a model name");
    if (llm.api_key.empty()) throw ConfigError("the llm planner needs FORGE_LLM_API_KEY to be set");
  }
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j = {{"max_actions", c.max_actions},
                      {"min_improvement", c.min_improvement},
                      {"time_budget", c.time_budget},
                      {"patience", c.patience},
                      {"cleaning_mode", std::string(to_string(c.cleaning_mode))},
                      {"time_column", c.time_column ? nlohmann::json(*c.time_column) : nlohmann::json(nullptr)},
                      {"missing_tokens", c.missing.tokens},
                      {"planner", std::string(to_string(c.planner))},
                      {"seed", c.seed},
                      {"task_hint", c.task_hint ? nlohmann::json(std::string(to_string(*c.task_hint)))
                                                : nlohmann::json(nullptr)},
                      {"target", c.target ? nlohmann::json(*c.target) : nlohmann::json(nullptr)},
                      {"n_folds", c.n_folds}};
  if (c.planner == PlannerKind::Llm)
    j["llm"] = {{"endpoint", c.llm.endpoint},
                {"model", c.llm.model},
                {"temperature", c.llm.temperature},
                {"timeout", c.llm.timeout.count()},
                {"max_retries", c.llm.max_retries},
                {"prompt", kPromptVersion}};
  return j;
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::MaxActions: return "max_actions";
    case StopReason::TimeBudget: return "time_budget";
    case StopReason::Patience: return "patience";
    case StopReason::PlannerExhausted: return "planner exhausted";
  }
  return "?";
}

std::optional<StopReason> should_stop(const RunState& state, const RunConfig& config) {
  if (state.actions_used >= config.max_actions) return StopReason::MaxActions;
  if (state.clock >= config.time_budget) return StopReason::TimeBudget;
  if (state.non_improving_streak >= config.patience) return StopReason::Patience;
  if (state.planner_exhausted) return StopReason::PlannerExhausted;
  return std::nullopt;
}

nlohmann::json to_json(const ExperienceRecord& r) {
  nlohmann::json j = {{"type", "iteration"},
                      {"iteration", r.iteration},
                      {"plan", to_json(r.plan)},
                      {"grounding", to_json(r.grounding)},
                      {"executed", r.executed},
                      {"metric_before", r.metric_before}};
  if (r.metric_after) j["metric_after"] = *r.metric_after;
  j["accepted"] = r.accepted;
  j["planner_origin"] = std::string(to_string(r.planner_origin));
  j["features_after"] = r.features_after;
  j["note"] = r.note;
  j["timestamp"] = r.timestamp;
  j["wall_time"] = r.wall_time;
  return j;
}

ExperienceStore::ExperienceStore(const std::filesystem::path& path, const nlohmann::json& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot open experience log " + path.string());
  write_line(header);
}

void ExperienceStore::append(const ExperienceRecord& record) { write_line(to_json(record)); }

void ExperienceStore::write_line(const nlohmann::json& j) {
  out_ << j.dump() << '\n';
  out_.flush();
  if (!out_) throw IoError("write failed: " + path_.string());
}

std::string format_progress(const ProgressEvent& e) {
  if (e.iteration) return "iter " + std::to_string(*e.iteration) + " | " + e.message;
  switch (e.kind) {
    case EventKind::Clean: return "clean: " + e.message;
    case EventKind::Route: return "route: " + e.message;
    case EventKind::Baseline: return "baseline: " + e.message;
    case EventKind::Stop: return "stop: " + e.message;
    case EventKind::Error: return "error: " + e.message;
    default: return e.message;
  }
}

std::string summary_line(std::size_t features_before, std::size_t features_after, double baseline, double best,
                         StopReason stop) {
  return "features: " + std::to_string(features_before) + " → " + std::to_string(features_after) +
         ", metric: " + fixed(baseline, 3) + " → " + fixed(best, 3) + ", stop: " + std::string(to_string(stop));
}

std::string render_report(const ReportInput& in) {
  std::ostringstream os;
  const std::string metric(to_string(in.baseline.primary.kind));
  os << "# Run report\n\n";
  os << "Input: " << in.input_name << " (" << in.n_rows << " rows after cleaning"
     << (in.target ? ", target " + *in.target : std::string{}) << ").\n";
  os << "Generated: " << in.timestamp << "\n";
  os << "Wall time: " << fixed(in.wall_time, 2) << " s\n\n";

  os << "## (i) Cleaning and feature operations\n\n";
  os << "Cleaning mode: " << to_string(in.cleaning_mode) << ".\n\n";
  for (const auto& s : in.cleaning.steps) {
    os << "- " << s.name << ": " << s.cells_changed << " cells changed";
    if (!s.columns.empty()) os << " (" << join(s.columns, ", ") << ")";
    os << ".\n";
  }
  if (!in.cleaning.columns_dropped.empty())
    os << "- Columns dropped: " << join(in.cleaning.columns_dropped, ", ") << ".\n";
  os << "- Rows dropped: " << in.cleaning.rows_dropped << ".\n\n";
  os << "Accepted feature operations:\n\n";
  bool any = false;
  for (const auto& r : in.log) {
    if (!r.accepted) continue;
    for (const auto& a : r.plan.actions) {
      os << "- Iteration " << r.iteration << ": " << describe_action(a) << "\n";
      any = true;
    }
  }
  if (!any) os << "- None.\n";

  os << "\n## (ii) Routing decisions\n\n";
  os << "- " << in.routing.rule_fired << " → " << to_string(in.routing.task) << ". " << in.routing.rationale << "\n";
  os << "- Primary metric " << metric << " from " << to_string(in.baseline.learner.kind);
  if (in.baseline.n_folds) os << " under " << in.baseline.n_folds << "-fold cross-validation";
  os << ", seed " << in.baseline.seed << ".";
  if (!in.baseline.note.empty()) os << " Note: " << in.baseline.note << ".";
  os << "\n";

  os << "\n## (iii) Validation checks\n\n";
  std::size_t admissible = 0, failures = 0;
  for (const auto& r : in.log) {
    if (r.grounding.plan_admissible) {
      ++admissible;
      os << "- Iteration " << r.iteration << ": " << r.plan.actions.size() << " action(s) passed G1-G7.";
      if (!r.metric_after && !r.note.empty()) os << " Execution failed: " << r.note << ".";
      os << "\n";
      continue;
    }
    for (std::size_t i = 0; i < r.grounding.verdicts.size(); ++i) {
      const auto& v = r.grounding.verdicts[i];
      if (v.pass) continue;
      ++failures;
      os << "- Iteration " << r.iteration << ": action " << i + 1 << " " << action_signature(r.plan.actions[i])
         << " failed " << to_string(*v.code) << ": " << v.message << ".\n";
    }
    os << "- Iteration " << r.iteration << ": plan rejected before execution; re-planned.\n";
  }
  if (in.log.empty()) os << "- No plans were proposed.\n";
  os << "\nPlans checked: " << in.log.size() << ", admissible: " << admissible << ", grounding failures: " << failures
     << ".\n";

  os << "\n## (iv) Performance progression\n\n";
  os << "Baseline " << metric << ": " << fixed(in.baseline.primary.value, 4) << ".\n\n";
  os << "| iteration | origin | actions | metric | delta | decision | best | features |\n";
  os << "|---|---|---|---|---|---|---|---|\n";
  double best = in.baseline.primary.value;
  for (const auto& r : in.log) {
    if (r.accepted) best = *r.metric_after;
    os << "| " << r.iteration << " | " << to_string(r.planner_origin) << " | " << escape_cell(plan_signatures(r.plan))
       << " | " << (r.metric_after ? fixed(*r.metric_after, 4) : "-") << " | "
       << (r.metric_after ? signed_fixed(*r.metric_after - r.metric_before, 4) : "-") << " | " << decision_of(r)
       << " | " << fixed(best, 4) << " | " << r.features_after << " |\n";
  }

  os << "\n## Summary\n\n";
  os << summary_line(in.features_before, in.features_after, in.baseline.primary.value, in.best_metric, in.stop)
     << "\n";
  return os.str();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunResult run(const RunConfig& config, const Table& input, Planner& planner, const RunOptions& options) {
  config.validate();
  std::function<double()> clock = options.clock;
  if (!clock)
    clock = [] { return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count(); };
  std::function<std::string()> stamp = options.timestamp;
  if (!stamp) stamp = utc_timestamp;
  const auto emit = [&](EventKind kind, std::optional<std::size_t> iter, std::string msg) {
    if (options.progress) options.progress(ProgressEvent{kind, iter, std::move(msg)});
  };
  const double start = clock();

  if (input.empty()) throw IngestError("input table is empty");
  if (config.target && !input.find(*config.target))
    throw RoutingError("target column '" + *config.target + "' does not exist");
  const Table raw = input.with_target(config.target);

  RunResult result;
  CleaningResult cleaned = clean(raw, config.cleaning_mode, config.time_column, config.missing);
  for (const auto& s : cleaned.report.steps)
    emit(EventKind::Clean, std::nullopt, s.name + " (" + std::to_string(s.cells_changed) + " cells)");
  result.cleaned_table = cleaned.table;
  result.cleaning = cleaned.report;

  const auto profiles = profile(cleaned.table);
  result.routing = route_task(profiles, cleaned.table.target(), config.task_hint);
  const TaskKind task = result.routing.task;
  emit(EventKind::Route, std::nullopt,
       result.routing.rule_fired + " " + std::string(to_string(task)) + ": " + result.routing.rationale);

  result.baseline = evaluate_table(cleaned.table, task, config.seed, config.n_folds);
  emit(EventKind::Baseline, std::nullopt,
       std::string(to_string(result.baseline.primary.kind)) + " " + fixed(result.baseline.primary.value, 4) + " (" +
           std::string(to_string(result.baseline.learner.kind)) +
           (result.baseline.n_folds ? ", " + std::to_string(result.baseline.n_folds) + " folds" : "") + ")");
  result.features_before = cleaned.table.n_features();

  std::optional<ExperienceStore> store;
  if (options.out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*options.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + options.out_dir->string() + ": " + ec.message());
    nlohmann::json header = {{"type", "header"},
                             {"format", "forge-experience"},
                             {"version", 1},
                             {"input", options.input_name},
                             {"config", to_json(config)},
                             {"task", std::string(to_string(task))},
                             {"routing_rule", result.routing.rule_fired},
                             {"metric", std::string(to_string(result.baseline.primary.kind))},
                             {"baseline_metric", result.baseline.primary.value},
                             {"n_rows", cleaned.table.n_rows()},
                             {"features_before", result.features_before},
                             {"timestamp", stamp()}};
    store.emplace(*options.out_dir / "experience.jsonl", header);
  }

  RunState& st = result.state;
  st.working_table = cleaned.table;
  st.best_table = cleaned.table;
  st.best_metric = result.baseline.primary.value;

  std::optional<StopReason> stop;
  while (true) {
    st.clock = clock() - start;
    if ((stop = should_stop(st, config))) break;

    PlannerContext ctx;
    ctx.task = task;
    ctx.profiles = profile(st.best_table);
    ctx.n_rows = st.best_table.n_rows();
    ctx.baseline_metric = result.baseline.primary.value;
    ctx.best_metric = st.best_metric;
    for (const auto& r : result.log) ctx.history.push_back(digest(r));
    ctx.iteration = st.iteration + 1;
    ctx.remaining_actions = config.max_actions - st.actions_used;

    PlannerOutcome outcome;
    try {
      outcome = planner.next(ctx);
    } catch (const ContractViolation&) {
      throw;
    } catch (const std::exception& e) {
      outcome.plan.reset();
      outcome.note = std::string("planner failed: ") + e.what();
    }
    if (!outcome.plan) {
      if (!outcome.note.empty()) emit(EventKind::Planner, std::nullopt, "planner: " + outcome.note);
      st.planner_exhausted = true;
      continue;
    }

    ++st.iteration;
    ExperienceRecord rec;
    rec.iteration = st.iteration;
    rec.plan = *outcome.plan;
    rec.plan.iteration = st.iteration;
    rec.planner_origin = rec.plan.origin;
    rec.metric_before = st.best_metric;
    rec.note = outcome.note;
    const std::size_t allowed = std::min(kMaxPlanActions, config.max_actions - st.actions_used);
    if (rec.plan.actions.size() > allowed) {
      rec.plan.actions.resize(allowed);
      rec.note += std::string(rec.note.empty() ? "" : "; ") + "plan truncated to " + std::to_string(allowed) +
                  " action(s)";
    }
    const auto tag = st.iteration;
    if (!outcome.note.empty()) emit(EventKind::Planner, tag, "planner: " + outcome.note);
    emit(EventKind::Plan, tag, "plan " + std::string(to_string(rec.plan.origin)) + ": " + plan_signatures(rec.plan));

    rec.grounding = ground_plan(rec.plan, ctx.profiles, st.best_table.target());
    if (!rec.grounding.plan_admissible) {
      for (const auto& v : rec.grounding.verdicts)
        if (!v.pass) emit(EventKind::Ground, tag, "ground FAIL " + std::string(to_string(*v.code)) + ": " + v.message);
      ++st.non_improving_streak;
      rec.features_after = st.best_table.n_features();
      rec.timestamp = stamp();
      if (store) store->append(rec);
      result.log.push_back(std::move(rec));
      continue;
    }
    emit(EventKind::Ground, tag, "ground ok (" + std::to_string(rec.plan.actions.size()) +
                                 (rec.plan.actions.size() == 1 ? " action)" : " actions)"));

    const double t0 = clock();
    std::optional<Table> candidate;
    try {
      candidate = execute_plan(rec.plan, st.best_table);
      rec.executed = true;
      st.working_table = *candidate;
      const EvalResult eval = evaluate_table(*candidate, task, config.seed, config.n_folds);
      rec.metric_after = eval.primary.value;
    } catch (const ContractViolation&) {
      throw;
    } catch (const std::exception& e) {
      rec.note += std::string(rec.note.empty() ? "" : "; ") + e.what();
      emit(EventKind::Error, tag, std::string("error: ") + e.what());
    }
    rec.wall_time = clock() - t0;

    if (rec.metric_after) {
      const double delta = *rec.metric_after - rec.metric_before;
      emit(EventKind::Metric, tag,
           "metric " + std::string(to_string(result.baseline.primary.kind)) + " " + fixed(*rec.metric_after, 4));
      if (delta >= config.min_improvement) {
        rec.accepted = true;
        st.best_table = *candidate;
        st.best_metric = *rec.metric_after;
        st.actions_used += rec.plan.actions.size();
        st.non_improving_streak = 0;
        emit(EventKind::Accept, tag, "accept Δ=" + signed_fixed(delta, 4) + " (best " + fixed(st.best_metric, 4) + ")");
      } else {
        ++st.non_improving_streak;
        emit(EventKind::Reject, tag, "reject Δ=" + signed_fixed(delta, 4) + " (best " + fixed(st.best_metric, 4) + ")");
      }
    } else {
      ++st.non_improving_streak;
    }
    st.working_table = st.best_table;
    rec.features_after = st.best_table.n_features();
    rec.timestamp = stamp();
    if (store) store->append(rec);
    result.log.push_back(std::move(rec));
  }

  result.stop = *stop;
  result.best_table = st.best_table;
  emit(EventKind::Stop, std::nullopt, std::string(to_string(*stop)) + " (" + stop_detail(*stop, st, config) + ")");

  ReportInput rep;
  rep.input_name = options.input_name;
  rep.n_rows = cleaned.table.n_rows();
  rep.target = cleaned.table.target();
  rep.cleaning_mode = config.cleaning_mode;
  rep.cleaning = result.cleaning;
  rep.routing = result.routing;
  rep.baseline = result.baseline;
  rep.log = result.log;
  rep.features_before = result.features_before;
  rep.features_after = st.best_table.n_features();
  rep.best_metric = st.best_metric;
  rep.stop = *stop;
  rep.timestamp = stamp();
  rep.wall_time = clock() - start;
  result.report = render_report(rep);
  emit(EventKind::Summary, std::nullopt,
       summary_line(rep.features_before, rep.features_after, result.baseline.primary.value, st.best_metric, *stop));

  if (options.out_dir) {
    write_text(*options.out_dir / "report.md", result.report);
    write_text(*options.out_dir / "best_table.csv", to_csv(st.best_table));
    write_text(*options.out_dir / "run_config.json", to_json(config).dump(2) + "\n");
  }
  return result;
}

}  // namespace forge
