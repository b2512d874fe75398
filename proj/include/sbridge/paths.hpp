#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "sbridge/core.hpp"

namespace sbridge {

inline constexpr std::size_t kDefaultPathBudget = 1'000'000;

struct PathMass {
  Path path;
  double mass = 0.0;
};

// Depth-first walk over every positive-mass path of the measure, optionally
// pinned at its start and/or end node. Prefixes that cannot reach the end
// node are skipped. Throws EnumerationBudgetExceeded past `budget` paths.
void for_each_path(const PathMeasure& measure, std::optional<std::size_t> start, std::optional<std::size_t> end,
                   std::size_t budget, const std::function<void(const Path&, double log_mass)>& visit);

// Sorted by mass descending, ties broken by lexicographic path order.
void sort_by_mass(std::vector<PathMass>& table);

// Label path as "1-2-7-9" using node labels.
std::string format_path(const Path& path, const NodeSet& nodes);

}  // namespace sbridge
