#pragma once

#include <exception>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "forge/controller.hpp"

namespace forge {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInternal = 3;

struct CliArgs {
  std::filesystem::path input;
  RunConfig config;
  std::filesystem::path out_dir = "forge_out";
  char delimiter = ',';
  bool quiet = false;
};

struct ParsedArgs {
  std::optional<CliArgs> args;  // set when the run should proceed
  int exit_code = kExitOk;      // otherwise: 0 after --help, 1 on usage errors
  std::string message;          // help text or the usage error
};

// Never throws. `env` looks up environment variables (FORGE_LLM_API_KEY).
ParsedArgs parse_args(const std::vector<std::string>& argv,
                      const std::function<std::optional<std::string>(const std::string&)>& env);

// 1 for configuration and output errors, 2 for ingestion, cleaning, routing
// and baseline evaluation failures, 3 for anything else.
int exit_code_for(const std::exception& error);

// The whole command: parse, ingest, run, print. Returns the exit code.
// `transport` overrides the HTTP transport of the llm planner.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err,
            const std::function<std::optional<std::string>(const std::string&)>& env,
            const LlmTransport& transport = {});

std::optional<std::string> process_env(const std::string& name);

}  // namespace forge
