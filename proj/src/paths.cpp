#include "sbridge/paths.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "sbridge/error.hpp"
#include "sbridge/logmath.hpp"

namespace sbridge {

void for_each_path(const PathMeasure& measure, std::optional<std::size_t> start, std::optional<std::size_t> end,
                   std::size_t budget, const std::function<void(const Path&, double log_mass)>& visit) {
  const std::size_t n = measure.size();
  const std::size_t horizon = measure.horizon();
  if ((start && *start >= n) || (end && *end >= n)) fail(ErrorCode::IndexOutOfRange, "path endpoint out of range");

  // alive[t][i]: the end node is reachable from i at time t.
  std::vector<std::vector<char>> alive(horizon + 1, std::vector<char>(n, 1));
  if (end) {
    std::fill(alive[horizon].begin(), alive[horizon].end(), 0);
    alive[horizon][*end] = 1;
    for (std::size_t t = horizon; t-- > 0;)
      for (std::size_t i = 0; i < n; ++i) {
        char ok = 0;
        for (std::size_t j = 0; j < n && !ok; ++j) ok = alive[t + 1][j] && measure.step(t).support(i, j);
        alive[t][i] = ok;
      }
  }

  std::size_t count = 0;
  Path prefix;
  prefix.reserve(horizon + 1);
  std::function<void(double)> walk = [&](double log_mass) {
    const std::size_t t = prefix.size() - 1;
    if (t == horizon) {
      if (++count > budget)
        fail(ErrorCode::EnumerationBudgetExceeded, "more than " + std::to_string(budget) + " feasible paths");
      visit(prefix, log_mass);
      return;
    }
    const Matrix& lk = measure.step(t).log_entries();
    const std::size_t from = prefix.back();
    for (std::size_t j = 0; j < n; ++j) {
      if (lk(from, j) == kNegInf || !alive[t + 1][j]) continue;
      prefix.push_back(j);
      walk(log_mass + lk(from, j));
      prefix.pop_back();
    }
  };

  const auto& li = measure.log_initial();
  for (std::size_t x0 = 0; x0 < n; ++x0) {
    if (start && x0 != *start) continue;
    if (li[x0] == kNegInf || !alive[0][x0]) continue;
    prefix.assign(1, x0);
    walk(li[x0]);
  }
}

void sort_by_mass(std::vector<PathMass>& table) {
  // Masses equal to 12 significant digits count as ties, broken by path order,
  // so that equal-cost paths list deterministically.
  std::vector<std::pair<double, std::size_t>> keys(table.size());
  for (std::size_t k = 0; k < table.size(); ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", table[k].mass);
    keys[k] = {std::strtod(buf, nullptr), k};
  }
  std::sort(keys.begin(), keys.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return table[a.second].path < table[b.second].path;
  });
  std::vector<PathMass> sorted;
  sorted.reserve(table.size());
  for (const auto& [m, k] : keys) sorted.push_back(std::move(table[k]));
  table = std::move(sorted);
}

std::string format_path(const Path& path, const NodeSet& nodes) {
  std::string s;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (k) s += '-';
    s += nodes.label(path[k]);
  }
  return s;
}

}  // namespace sbridge
