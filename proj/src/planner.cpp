#include "forge/planner.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "forge/errors.hpp"
#include "forge/grounding.hpp"
#include "forge/random.hpp"

namespace forge {

namespace {

constexpr std::size_t kHeuristicActions = 3;
constexpr std::size_t kTopCorrelated = 5;
constexpr std::size_t kPolynomialColumns = 3;

const char* const kPromptTemplate =
#include "forge/planner_prompt.inc"
    ;

std::optional<std::string> target_of(const std::vector<ColumnProfile>& profiles) {
  for (const auto& p : profiles)
    if (p.is_target) return p.name;
  return std::nullopt;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

class HeuristicBuilder {
 public:
  HeuristicBuilder(const PlannerContext& ctx, std::uint64_t seed, std::size_t cap)
      : ctx_(ctx), seed_(seed), cap_(cap), target_(target_of(ctx.profiles)) {
    for (const auto& d : ctx.history)
      for (const auto& s : d.actions) {
        try {
          attempted_.insert(action_key(action_from_json(nlohmann::json::parse(s))));
        } catch (const std::exception&) {
        }
      }
    for (const auto& p : ctx.profiles) names_.insert(p.name);
  }

  std::optional<Plan> build() {
    const auto keep = keep_candidate();
    scan_h1(nullptr);
    scan_h2(nullptr);
    if (keep && actions_.size() < cap_) {
      // Restart with the selection first so later actions only touch
      // surviving columns.
      actions_.clear();
      reset_names();
      std::set<std::string> survivors;
      for (const auto& e : ground_plan(Plan{{*keep}}, ctx_.profiles, target_).predicted_schema)
        survivors.insert(e.name);
      try_add(*keep);
      scan_h1(&survivors);
      scan_h2(&survivors);
      scan_h4(&survivors);
      scan_h5(&survivors);
    } else {
      scan_h4(nullptr);
      scan_h5(nullptr);
    }
    if (actions_.empty()) return std::nullopt;
    Plan plan;
    plan.actions = actions_;
    plan.origin = PlanOrigin::Heuristic;
    plan.iteration = ctx_.iteration;
    return plan;
  }

 private:
  std::uint64_t tie(std::string_view name) const { return splitmix64(seed_ ^ hash_name(name)); }

  bool full() const { return actions_.size() >= cap_; }

  void reset_names() {
    names_.clear();
    for (const auto& p : ctx_.profiles) names_.insert(p.name);
  }

  std::string fresh(const std::string& base) const {
    if (!names_.contains(base)) return base;
    for (int i = 2;; ++i) {
      const std::string name = base + "_" + std::to_string(i);
      if (!names_.contains(name)) return name;
    }
  }

  std::vector<const ColumnProfile*> numeric(const std::set<std::string>* survivors) const {
    std::vector<const ColumnProfile*> out;
    for (const auto& p : ctx_.profiles)
      if (!p.is_target && p.kind == ColumnKind::Numeric && (!survivors || survivors->contains(p.name)))
        out.push_back(&p);
    return out;
  }

  // Sorts by score, highest first, with the seed hash breaking ties.
  template <typename Score>
  void rank(std::vector<const ColumnProfile*>& cols, Score score) const {
    std::stable_sort(cols.begin(), cols.end(), [&](const ColumnProfile* a, const ColumnProfile* b) {
      const double sa = score(*a), sb = score(*b);
      if (sa != sb) return sa > sb;
      return tie(a->name) < tie(b->name);
    });
  }

  bool try_add(const Action& action) {
    if (full()) return false;
    const std::string key = action_key(action);
    if (attempted_.contains(key)) return false;
    for (const auto& a : actions_)
      if (action_key(a) == key) return false;
    Plan trial;
    trial.actions = actions_;
    trial.actions.push_back(action);
    if (!ground_plan(trial, ctx_.profiles, target_).plan_admissible) return false;
    actions_.push_back(action);
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, TransformUnary> || std::is_same_v<T, TransformBinary>) {
            names_.insert(a.out_name);
          } else if constexpr (std::is_same_v<T, GeneratePolynomial>) {
            for (auto& n : polynomial_output_names(a)) names_.insert(n);
          }
        },
        action);
    return true;
  }

  std::optional<Action> keep_candidate() const {
    std::size_t features = 0;
    for (const auto& p : ctx_.profiles)
      if (!p.is_target) ++features;
    const auto limit = 2 * static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(ctx_.n_rows))));
    if (features <= limit) return std::nullopt;
    SelectKeepTopK keep;
    keep.k = (features + 1) / 2;
    keep.criterion = target_ ? KeepCriterion::TargetCorrelation : KeepCriterion::Variance;
    if (attempted_.contains(action_key(keep))) return std::nullopt;
    if (!ground_plan(Plan{{keep}}, ctx_.profiles, target_).plan_admissible) return std::nullopt;
    return keep;
  }

  void scan_h1(const std::set<std::string>* survivors) {
    auto cols = numeric(survivors);
    std::erase_if(cols, [](const ColumnProfile* p) {
      return !p->skewness || std::abs(*p->skewness) <= 2.0 || !p->min || *p->min <= -1.0 ||
             ends_with(p->name, "_log1p");
    });
    rank(cols, [](const ColumnProfile& p) { return std::abs(*p.skewness); });
    for (const auto* p : cols)
      if (full() || try_add(TransformUnary{UnaryOp::Log1p, p->name, fresh(p->name + "_log1p"), 0})) return;
  }

  void scan_h2(const std::set<std::string>* survivors) {
    if (ctx_.task == TaskKind::Unsupervised || full()) return;
    auto cols = numeric(survivors);
    std::erase_if(cols, [](const ColumnProfile* p) { return !p->target_correlation; });
    rank(cols, [](const ColumnProfile& p) { return std::abs(*p.target_correlation); });
    if (cols.size() > kTopCorrelated) cols.resize(kTopCorrelated);

    struct Pair {
      const ColumnProfile* a;
      const ColumnProfile* b;
      double score;
      std::uint64_t tie;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < cols.size(); ++i)
      for (std::size_t j = i + 1; j < cols.size(); ++j) {
        const auto* a = cols[i];
        const auto* b = cols[j];
        if (names_.contains(a->name + "_mul_" + b->name) || names_.contains(b->name + "_mul_" + a->name)) continue;
        pairs.push_back({a, b, std::abs(*a->target_correlation) + std::abs(*b->target_correlation),
                         tie(a->name) ^ splitmix64(tie(b->name))});
      }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
      if (x.score != y.score) return x.score > y.score;
      return x.tie < y.tie;
    });
    for (const auto& p : pairs)
      if (full() || try_add(TransformBinary{BinaryOp::Mul, p.a->name, p.b->name, fresh(p.a->name + "_mul_" + p.b->name)}))
        return;
  }

  void scan_h4(const std::set<std::string>* survivors) {
    auto cols = numeric(survivors);
    std::erase_if(cols, [](const ColumnProfile* p) {
      if (!p->mean || !p->stddev || !p->min || !p->max || ends_with(p->name, "_z")) return true;
      return !(std::abs(*p->mean) > 10.0 * *p->stddev || *p->max - *p->min > 1000.0);
    });
    rank(cols, [](const ColumnProfile& p) { return *p.max / 2 - *p.min / 2; });
    for (const auto* p : cols)
      if (full() || try_add(TransformUnary{UnaryOp::Zscore, p->name, fresh(p->name + "_z"), 0})) return;
  }

  void scan_h5(const std::set<std::string>* survivors) {
    if (full()) return;
    auto cols = numeric(survivors);
    std::erase_if(cols, [](const ColumnProfile* p) { return !p->stddev || *p->stddev <= 0.0; });
    rank(cols, [](const ColumnProfile& p) { return *p.stddev; });
    if (cols.size() > kPolynomialColumns) cols.resize(kPolynomialColumns);
    if (cols.empty()) return;
    GeneratePolynomial poly;
    poly.degree = 2;
    for (const auto* p : cols) poly.columns.push_back(p->name);
    poly.out_prefix = "poly";
    for (int i = 2;; ++i) {
      const auto outs = polynomial_output_names(poly);
      if (std::none_of(outs.begin(), outs.end(), [&](const std::string& n) { return names_.contains(n); })) break;
      poly.out_prefix = "poly" + std::to_string(i);
    }
    try_add(poly);
  }

  const PlannerContext& ctx_;
  std::uint64_t seed_;
  std::size_t cap_;
  std::optional<std::string> target_;
  std::set<std::string> attempted_;
  std::set<std::string> names_;
  std::vector<Action> actions_;
};

std::string metric_name(TaskKind task) {
  switch (task) {
    case TaskKind::Classification: return "f1_macro";
    case TaskKind::Regression: return "one_minus_rae";
    case TaskKind::Unsupervised: return "silhouette";
  }
  return "?";
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string schema_lines(const PlannerContext& ctx) {
  std::ostringstream os;
  for (const auto& p : ctx.profiles) {
    os << "- " << p.name << ": " << to_string(p.kind);
    if (p.is_target) os << " (target)";
    os << ", missing " << fixed(100.0 * p.missing_rate, 1) << "%, distinct " << p.n_distinct;
    if (p.min) os << ", min " << format_number(*p.min) << ", max " << format_number(*p.max);
    if (p.mean) os << ", mean " << format_number(*p.mean) << ", sd " << format_number(*p.stddev);
    if (p.skewness) os << ", skew " << fixed(*p.skewness, 3);
    if (p.kind == ColumnKind::Numeric) os << (p.has_zero ? ", contains zero" : ", no zeros");
    if (p.target_correlation) os << ", target corr " << fixed(*p.target_correlation, 3);
    if (!p.top_values.empty()) {
      os << ", top";
      for (const auto& [label, count] : p.top_values) os << " " << label << "(" << count << ")";
    }
    os << "\n";
  }
  std::string s = os.str();
  if (!s.empty()) s.pop_back();
  return s;
}

std::string history_lines(const PlannerContext& ctx) {
  if (ctx.history.empty()) return "(none)";
  std::ostringstream os;
  for (const auto& d : ctx.history) {
    os << "- iteration " << d.iteration << ": [";
    for (std::size_t i = 0; i < d.actions.size(); ++i) {
      if (i) os << ", ";
      try {
        os << action_signature(action_from_json(nlohmann::json::parse(d.actions[i])));
      } catch (const std::exception&) {
        os << d.actions[i];
      }
    }
    os << "] ";
    if (!d.admissible) {
      os << "rejected by validation (" << d.failure << ")";
    } else if (d.delta) {
      os << (d.accepted ? "accepted" : "rejected") << ", delta " << (*d.delta >= 0 ? "+" : "") << fixed(*d.delta, 4);
    } else {
      os << "failed";
      if (!d.failure.empty()) os << " (" << d.failure << ")";
    }
    os << "\n";
  }
  std::string s = os.str();
  s.pop_back();
  return s;
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) s.replace(pos, from.size(), to);
}

// Index one past the bracket that closes the array opening at `start`, or
// npos. String literals are skipped.
std::size_t array_end(const std::string& s, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '[' || c == '{') ++depth;
    else if (c == ']' || c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string::npos;
}

std::string reply_content(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("response is not JSON: ") + e.what());
  }
  try {
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("response has no choices[0].message.content string");
  }
}

PlannerOutcome fallback(const PlannerContext& ctx, std::uint64_t seed, std::string note) {
  PlannerOutcome out;
  out.plan = plan_heuristic(ctx, seed);
  out.note = std::move(note) + "; heuristic fallback";
  return out;
}

class HeuristicPlanner : public Planner {
 public:
  explicit HeuristicPlanner(std::uint64_t seed) : seed_(seed) {}
  PlannerOutcome next(const PlannerContext& ctx) override { return {plan_heuristic(ctx, seed_), ""}; }

 private:
  std::uint64_t seed_;
};

class LlmPlanner : public Planner {
 public:
  LlmPlanner(LlmConfig config, LlmTransport transport, std::uint64_t seed)
      : config_(std::move(config)), transport_(std::move(transport)), seed_(seed) {}
  PlannerOutcome next(const PlannerContext& ctx) override { return plan_llm(ctx, config_, transport_, seed_); }

 private:
  LlmConfig config_;
  LlmTransport transport_;
  std::uint64_t seed_;
};

}  // namespace

std::string action_key(const Action& action) {
  Action blank = action;
  std::visit(
      [](auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, TransformUnary> || std::is_same_v<T, TransformBinary> ||
                      std::is_same_v<T, GenerateGroupAgg>) {
          a.out_name.clear();
        } else if constexpr (std::is_same_v<T, GeneratePolynomial>) {
          a.out_prefix.clear();
        }
      },
      blank);
  return canonical(blank);
}

std::optional<Plan> plan_heuristic(const PlannerContext& ctx, std::uint64_t seed) {
  const std::size_t cap = std::min(kHeuristicActions, ctx.remaining_actions);
  if (cap == 0) return std::nullopt;
  return HeuristicBuilder(ctx, seed, cap).build();
}

std::string render_prompt(const PlannerContext& ctx) {
  std::string s = kPromptTemplate;
  replace_all(s, "{{task}}", std::string(to_string(ctx.task)));
  replace_all(s, "{{n_rows}}", std::to_string(ctx.n_rows));
  replace_all(s, "{{metric}}", metric_name(ctx.task));
  replace_all(s, "{{baseline}}", fixed(ctx.baseline_metric, 4));
  replace_all(s, "{{best}}", fixed(ctx.best_metric, 4));
  replace_all(s, "{{iteration}}", std::to_string(ctx.iteration));
  replace_all(s, "{{remaining}}", std::to_string(ctx.remaining_actions));
  replace_all(s, "{{max_actions}}", std::to_string(std::min(kMaxPlanActions, ctx.remaining_actions)));
  replace_all(s, "{{schema}}", schema_lines(ctx));
  replace_all(s, "{{history}}", history_lines(ctx));
  return s;
}

std::vector<Action> parse_plan_reply(const std::string& content) {
  for (std::size_t start = content.find('['); start != std::string::npos; start = content.find('[', start + 1)) {
    const std::size_t end = array_end(content, start);
    if (end == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(content.substr(start, end - start));
    } catch (const nlohmann::json::exception&) {
      continue;
    }
    if (!j.is_array()) continue;
    if (j.empty()) throw ParseError("the JSON array contains no actions");
    std::vector<Action> actions;
    for (std::size_t i = 0; i < j.size(); ++i) {
      try {
        actions.push_back(action_from_json(j[i]));
      } catch (const ParseError& e) {
        throw ParseError("element " + std::to_string(i) + ": " + e.what());
      }
    }
    return actions;
  }
  throw ParseError("no JSON array found in the reply");
}

PlannerOutcome plan_llm(const PlannerContext& ctx, const LlmConfig& config, const LlmTransport& transport,
                        std::uint64_t seed) {
  nlohmann::json body = {{"model", config.model},
                         {"temperature", config.temperature},
                         {"messages", nlohmann::json::array({{{"role", "user"}, {"content", render_prompt(ctx)}}})}};
  const std::size_t attempts = 1 + config.max_retries;
  std::string last_error;
  for (std::size_t attempt = 1; attempt <= attempts; ++attempt) {
    std::string content;
    try {
      content = reply_content(transport(body.dump()));
      auto actions = parse_plan_reply(content);
      if (actions.size() > kMaxPlanActions) actions.resize(kMaxPlanActions);
      PlannerOutcome out;
      out.plan = Plan{std::move(actions), PlanOrigin::Llm, ctx.iteration};
      if (attempt > 1) out.note = "llm reply valid on attempt " + std::to_string(attempt);
      return out;
    } catch (const TransportError& e) {
      return fallback(ctx, seed, std::string("llm endpoint failed: ") + e.what());
    } catch (const ParseError& e) {
      last_error = e.what();
      body["messages"].push_back({{"role", "assistant"}, {"content", content}});
      body["messages"].push_back(
          {{"role", "user"},
           {"content", "Your answer could not be used: " + last_error +
                           ". Answer again with a JSON array of action objects and nothing else."}});
    }
  }
  return fallback(ctx, seed,
                  "llm reply invalid after " + std::to_string(attempts) + " attempts (" + last_error + ")");
}

std::unique_ptr<Planner> make_heuristic_planner(std::uint64_t seed) { return std::make_unique<HeuristicPlanner>(seed); }

std::unique_ptr<Planner> make_llm_planner(LlmConfig config, LlmTransport transport, std::uint64_t seed) {
  return std::make_unique<LlmPlanner>(std::move(config), std::move(transport), seed);
}

}  // namespace forge
