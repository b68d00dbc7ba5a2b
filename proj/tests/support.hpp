#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "forge/csv.hpp"
#include "forge/table.hpp"

namespace forge::test {

inline Table csv(const std::string& text, std::optional<std::string> target = std::nullopt) {
  return parse_csv(text).with_target(std::move(target));
}

inline Column num(std::string name, std::vector<double> v) {
  std::vector<std::uint8_t> m(v.size(), 0);
  for (std::size_t i = 0; i < v.size(); ++i) m[i] = std::isnan(v[i]) ? 1 : 0;
  return Column::numeric(std::move(name), std::move(v), std::move(m));
}

inline const double kMissing = std::nan("");

}  // namespace forge::test
