// Writes the synthetic suite as CSV files: make_datasets <dir> [seed]
#include <filesystem>
#include <iostream>
#include <string>

#include "forge/csv.hpp"
#include "forge/synthetic.hpp"

int main(int argc, char** argv) {
  if (argc < 2 || argc > 3) {
    std::cerr << "usage: make_datasets <dir> [seed]\n";
    return 1;
  }
  const std::filesystem::path dir = argv[1];
  const std::uint64_t seed = argc == 3 ? std::stoull(argv[2]) : 7;
  std::filesystem::create_directories(dir);
  for (const auto& d : forge::synthetic_suite(seed)) {
    const auto path = dir / (d.name + ".csv");
    forge::write_csv(d.table, path);
    std::cout << path.string() << ": " << d.table.n_rows() << " rows, " << d.table.n_cols() << " columns\n";
  }
  return 0;
}
