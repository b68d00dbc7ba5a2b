#include <iostream>
#include <string>
#include <vector>

#include "forge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    return forge::run_cli(args, std::cout, std::cerr, forge::process_env);
  } catch (const std::exception& e) {
    std::cerr << "forge: internal error: " << e.what() << "\n";
    return forge::kExitInternal;
  }
}
