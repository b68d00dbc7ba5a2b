#include "forge/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "forge/csv.hpp"
#include "forge/errors.hpp"

namespace forge {

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::optional<char> parse_delimiter(const std::string& s) {
  if (s == "tab" || s == "\\t" || s == "\t") return '\t';
  if (s.size() == 1 && s[0] != '"' && s[0] != '\n' && s[0] != '\r') return s[0];
  return std::nullopt;
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (!v) return std::nullopt;
  return std::string(v);
}

ParsedArgs parse_args(const std::vector<std::string>& argv,
                      const std::function<std::optional<std::string>(const std::string&)>& env) {
  ParsedArgs parsed;
  CliArgs a;
  RunConfig& c = a.config;
  std::string input, target, task, cleaning = "light", time_column, planner = "heuristic", endpoint, model,
                                   missing, delimiter = ",", out_dir = a.out_dir.string();
  long long max_actions = static_cast<long long>(c.max_actions);
  long long patience = static_cast<long long>(c.patience);
  double min_improvement = c.min_improvement, time_budget = c.time_budget;
  std::uint64_t seed = c.seed;

  CLI::App app{"Turns a CSV table into a cleaned, feature-engineered table with a run report.", "forge"};
  app.add_option("input", input, "Input CSV file")->required();
  app.add_option("--target", target, "Target column");
  app.add_option("--task", task, "Task hint: classification, regression or unsupervised");
  app.add_option("--cleaning", cleaning, "Cleaning mode: light, aggressive or timeseries")->capture_default_str();
  app.add_option("--time-column", time_column, "Time column for timeseries cleaning");
  app.add_option("--max-actions", max_actions, "Accepted actions allowed in total")->capture_default_str();
  app.add_option("--min-improvement", min_improvement, "Smallest metric gain that counts as an improvement")
      ->capture_default_str();
  app.add_option("--time-budget", time_budget, "Seconds before no new iteration starts")->capture_default_str();
  app.add_option("--patience", patience, "Non-improving iterations before stopping")->capture_default_str();
  app.add_option("--planner", planner, "Planner: heuristic or llm")->capture_default_str();
  app.add_option("--llm-endpoint", endpoint, "Chat-completions URL for the llm planner");
  app.add_option("--llm-model", model, "Model name for the llm planner");
  app.add_option("--seed", seed, "Seed for folds, clustering and tie-breaking")->capture_default_str();
  app.add_option("--out-dir", out_dir, "Directory for the run outputs")->capture_default_str();
  app.add_option("--missing-tokens", missing, "Comma-separated cell values read as missing");
  app.add_option("--delimiter", delimiter, "CSV field delimiter (one character or 'tab')")->capture_default_str();
  app.add_flag("--quiet", a.quiet, "Only print errors and the final summary");

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    parsed.exit_code = kExitOk;
    parsed.message = app.help();
    return parsed;
  } catch (const CLI::ParseError& e) {
    parsed.exit_code = kExitUsage;
    parsed.message = std::string(e.what()) + "\n\n" + app.help();
    return parsed;
  }

  auto fail = [&](const std::string& msg) {
    parsed.exit_code = kExitUsage;
    parsed.message = msg + "\nRun with --help for usage.";
    return parsed;
  };

  a.input = input;
  a.out_dir = out_dir;
  if (!target.empty()) c.target = target;
  if (!task.empty()) {
    c.task_hint = parse_task_kind(task);
    if (!c.task_hint) return fail("--task: expected classification, regression or unsupervised, got '" + task + "'");
  }
  const auto mode = parse_cleaning_mode(cleaning);
  if (!mode) return fail("--cleaning: expected light, aggressive or timeseries, got '" + cleaning + "'");
  c.cleaning_mode = *mode;
  if (!time_column.empty()) c.time_column = time_column;
  if (max_actions < 1) return fail("--max-actions: must be at least 1");
  if (patience < 1) return fail("--patience: must be at least 1");
  if (!(time_budget > 0.0)) return fail("--time-budget: must be positive");
  c.max_actions = static_cast<std::size_t>(max_actions);
  c.patience = static_cast<std::size_t>(patience);
  c.min_improvement = min_improvement;
  c.time_budget = time_budget;
  c.seed = seed;
  if (!missing.empty()) {
    c.missing.tokens = split_commas(missing);
    if (std::find(c.missing.tokens.begin(), c.missing.tokens.end(), "") == c.missing.tokens.end())
      c.missing.tokens.insert(c.missing.tokens.begin(), "");
  }
  const auto delim = parse_delimiter(delimiter);
  if (!delim) return fail("--delimiter: expected a single character or 'tab'");
  a.delimiter = *delim;

  if (planner == "llm") {
    c.planner = PlannerKind::Llm;
    if (endpoint.empty()) return fail("--planner llm requires --llm-endpoint");
    if (model.empty()) return fail("--planner llm requires --llm-model");
    c.llm.endpoint = endpoint;
    c.llm.model = model;
    c.llm.api_key = env("FORGE_LLM_API_KEY").value_or("");
    if (c.llm.api_key.empty()) return fail("--planner llm requires the FORGE_LLM_API_KEY environment variable");
  } else if (planner != "heuristic") {
    return fail("--planner: expected heuristic or llm, got '" + planner + "'");
  }

  try {
    c.validate();
  } catch (const ConfigError& e) {
    return fail(e.what());
  }
  parsed.args = std::move(a);
  return parsed;
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error) || dynamic_cast<const IoError*>(&error)) return kExitUsage;
  if (dynamic_cast<const IngestError*>(&error) || dynamic_cast<const CleaningError*>(&error) ||
      dynamic_cast<const RoutingError*>(&error) || dynamic_cast<const EvaluationError*>(&error) ||
      dynamic_cast<const MetricError*>(&error))
    return kExitInput;
  return kExitInternal;
}

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err,
            const std::function<std::optional<std::string>(const std::string&)>& env,
            const LlmTransport& transport) {
  ParsedArgs parsed = parse_args(argv, env);
  if (!parsed.args) {
    (parsed.exit_code == kExitOk ? out : err) << parsed.message << "\n";
    return parsed.exit_code;
  }
  const CliArgs& a = *parsed.args;
  try {
    CsvOptions csv;
    csv.delimiter = a.delimiter;
    csv.missing = a.config.missing;
    const Table table = ingest_csv(a.input, csv);

    std::unique_ptr<Planner> planner;
    if (a.config.planner == PlannerKind::Llm)
      planner = make_llm_planner(a.config.llm, transport ? transport : http_transport(a.config.llm), a.config.seed);
    else
      planner = make_heuristic_planner(a.config.seed);

    RunOptions opts;
    opts.out_dir = a.out_dir;
    opts.input_name = a.input.filename().string();
    opts.progress = [&](const ProgressEvent& e) {
      if (a.quiet && e.kind != EventKind::Error && e.kind != EventKind::Summary) return;
      out << format_progress(e) << "\n";
      out.flush();
    };
    run(a.config, table, *planner, opts);
    if (!a.quiet) out << "outputs: " << a.out_dir.string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    err << "forge: " << (code == kExitInternal ? "internal error: " : "error: ") << e.what() << "\n";
    return code;
  }
}

}  // namespace forge
