#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "forge/routing.hpp"
#include "forge/table.hpp"

namespace forge {

struct SyntheticDataset {
  std::string name;  // file stem under datasets/
  Table table;       // target already set when there is one
  std::optional<TaskKind> task;
};

// y = x1 * x2 + noise with two extra uniform noise columns (regression).
SyntheticDataset make_interaction(std::uint64_t seed, std::size_t n_rows = 400);
// Binary label driven by a log-normal feature (classification).
SyntheticDataset make_skewed(std::uint64_t seed, std::size_t n_rows = 400);
// 40 features: 20 noisy copies of three latent signals and 20 pure noise
// columns (classification).
SyntheticDataset make_redundant(std::uint64_t seed, std::size_t n_rows = 300);
// Two Gaussian blobs in three dimensions, no target (unsupervised).
SyntheticDataset make_blobs(std::uint64_t seed, std::size_t n_rows = 300);

// The four datasets above, generated with `seed`.
std::vector<SyntheticDataset> synthetic_suite(std::uint64_t seed = 7);

}  // namespace forge
