#include "sbridge/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "sbridge/error.hpp"
#include "sbridge/logmath.hpp"

namespace sbridge::oracle {

namespace {

void sort_paths(std::vector<WeightedPath>& paths) {
  std::sort(paths.begin(), paths.end(), [](const WeightedPath& a, const WeightedPath& b) {
    if (a.mass != b.mass) return a.mass > b.mass;
    return a.path < b.path;
  });
}

}  // namespace

std::vector<WeightedPath> pinned_bridge_oracle(const PathMeasure& prior, std::size_t x0, std::size_t xN,
                                               const OracleBudget& budget) {
  const std::size_t n = prior.size();
  const std::size_t horizon = prior.horizon();
  if (x0 >= n || xN >= n) fail(ErrorCode::IndexOutOfRange, "endpoint out of range");
  if (n > budget.max_states)
    fail(ErrorCode::EnumerationBudgetExceeded, "oracle limited to " + std::to_string(budget.max_states) + " states");

  struct Found {
    Path path;
    double log_mass;
  };
  std::vector<Found> found;
  Path prefix{x0};
  std::function<void(double)> walk = [&](double log_mass) {
    const std::size_t t = prefix.size() - 1;
    if (t == horizon) {
      if (prefix.back() != xN) return;
      if (found.size() >= budget.max_paths)
        fail(ErrorCode::EnumerationBudgetExceeded, "more than " + std::to_string(budget.max_paths) + " paths");
      found.push_back({prefix, log_mass});
      return;
    }
    const Matrix& lk = prior.step(t).log_entries();
    for (std::size_t j = 0; j < n; ++j) {
      if (lk(prefix.back(), j) == kNegInf) continue;
      prefix.push_back(j);
      walk(log_mass + lk(prefix[t], j));
      prefix.pop_back();
    }
  };
  walk(0.0);  // conditioning on x0 cancels the initial weight
  if (found.empty()) fail(ErrorCode::NoFeasiblePath, "no feasible path between the endpoints");

  double top = kNegInf;
  for (const auto& f : found) top = std::max(top, f.log_mass);
  CompensatedSum z;
  std::vector<WeightedPath> out;
  out.reserve(found.size());
  for (auto& f : found) {
    const double w = std::exp(f.log_mass - top);
    z.add(w);
    out.push_back({std::move(f.path), w});
  }
  const double total = z.value();
  for (auto& w : out) w.mass /= total;
  sort_paths(out);
  return out;
}

std::size_t common_denominator(std::span<const double> p, std::span<const double> q, std::size_t max_units) {
  for (std::size_t d = 1; d <= max_units; ++d) {
    bool ok = true;
    for (auto v : {p, q})
      for (double x : v) {
        const double s = x * static_cast<double>(d);
        if (std::abs(s - std::round(s)) > 1e-9) ok = false;
      }
    if (ok) return d;
  }
  return 0;
}

namespace {

// Hungarian algorithm with row/column potentials, O(D^3).
std::vector<std::size_t> solve_assignment(const Matrix& cost) {
  const std::size_t n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

std::vector<std::size_t> expand_atoms(std::span<const double> w, std::size_t d) {
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto units = static_cast<std::size_t>(std::llround(w[i] * static_cast<double>(d)));
    owner.insert(owner.end(), units, i);
  }
  return owner;
}

void check_transport_shapes(const Matrix& cost, std::span<const double> p, std::span<const double> q) {
  if (cost.rows() != p.size() || cost.cols() != q.size())
    fail(ErrorCode::DimensionMismatch, "cost matrix does not match marginals");
}

}  // namespace

TransportResult assignment_ot_oracle(const Matrix& cost, std::span<const double> p, std::span<const double> q,
                                     const OracleBudget& budget) {
  check_transport_shapes(cost, p, q);
  const std::size_t d = common_denominator(p, q, budget.max_assignment_units);
  if (d == 0)
    fail(ErrorCode::IrrationalMarginals,
         "marginals have no common denominator <= " + std::to_string(budget.max_assignment_units));
  const auto rows = expand_atoms(p, d);
  const auto cols = expand_atoms(q, d);
  if (rows.size() != d || cols.size() != d)
    fail(ErrorCode::NotNormalized, "marginals do not expand to the common denominator");

  Matrix atom_cost(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) atom_cost(a, b) = cost(rows[a], cols[b]);
  const auto assignment = solve_assignment(atom_cost);

  TransportResult result{0.0, Matrix(p.size(), q.size())};
  CompensatedSum total;
  const double unit = 1.0 / static_cast<double>(d);
  for (std::size_t a = 0; a < d; ++a) {
    total.add(atom_cost(a, assignment[a]));
    result.coupling(rows[a], cols[assignment[a]]) += unit;
  }
  result.value = total.value() / static_cast<double>(d);
  return result;
}

TransportResult vertex_enumeration_ot_oracle(const Matrix& cost, std::span<const double> p,
                                             std::span<const double> q) {
  check_transport_shapes(cost, p, q);
  const std::size_t r = p.size(), c = q.size();
  if (r > 5 || c > 5) fail(ErrorCode::OracleScaleExceeded, "vertex enumeration limited to 5x5 instances");
  const std::size_t cells = r * c;
  const std::size_t basis = r + c - 1;

  TransportResult best{std::numeric_limits<double>::infinity(), Matrix(r, c)};
  std::vector<std::size_t> chosen;

  // Union-find over r row nodes and c column nodes; copied per level.
  std::function<void(std::size_t, std::vector<std::size_t>)> pick = [&](std::size_t start,
                                                                         std::vector<std::size_t> parent) {
    if (chosen.size() == basis) {
      // Solve the tree flow by peeling leaves.
      std::vector<double> supply(r + c);
      for (std::size_t i = 0; i < r; ++i) supply[i] = p[i];
      for (std::size_t j = 0; j < c; ++j) supply[r + j] = q[j];
      std::vector<char> alive(basis, 1);
      Matrix flow(r, c);
      for (std::size_t round = 0; round < basis; ++round) {
        std::vector<int> degree(r + c, 0);
        for (std::size_t e = 0; e < basis; ++e)
          if (alive[e]) {
            ++degree[chosen[e] / c];
            ++degree[r + chosen[e] % c];
          }
        for (std::size_t e = 0; e < basis; ++e) {
          if (!alive[e]) continue;
          const std::size_t i = chosen[e] / c, j = chosen[e] % c;
          const std::size_t leaf = degree[i] == 1 ? i : (degree[r + j] == 1 ? r + j : r + c);
          if (leaf == r + c) continue;
          const std::size_t other = leaf == i ? r + j : i;
          const double f = supply[leaf];
          flow(i, j) = f;
          supply[leaf] = 0.0;
          supply[other] -= f;
          alive[e] = 0;
          break;
        }
      }
      double value = 0.0;
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
          if (flow(i, j) < -1e-12) return;
          value += cost(i, j) * std::max(flow(i, j), 0.0);
        }
      if (value < best.value) {
        best.value = value;
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) best.coupling(i, j) = std::max(flow(i, j), 0.0);
      }
      return;
    }
    for (std::size_t cell = start; cell + (basis - chosen.size()) <= cells; ++cell) {
      auto find = [&](std::vector<std::size_t>& par, std::size_t x) {
        while (par[x] != x) x = par[x] = par[par[x]];
        return x;
      };
      std::vector<std::size_t> next = parent;
      const std::size_t a = find(next, cell / c), b = find(next, r + cell % c);
      if (a == b) continue;  // would close a cycle
      next[a] = b;
      chosen.push_back(cell);
      pick(cell + 1, std::move(next));
      chosen.pop_back();
    }
  };
  std::vector<std::size_t> parent(r + c);
  std::iota(parent.begin(), parent.end(), 0);
  pick(0, parent);
  return best;
}

namespace {

double kl_objective(const Matrix& pi, const Matrix& g) {
  CompensatedSum s;
  for (std::size_t i = 0; i < pi.rows(); ++i)
    for (std::size_t j = 0; j < pi.cols(); ++j) {
      const double x = pi(i, j);
      if (x < 0.0) return std::numeric_limits<double>::infinity();
      if (x == 0.0) continue;
      if (g(i, j) <= 0.0) return std::numeric_limits<double>::infinity();
      s.add(x * (std::log(x) - std::log(g(i, j))));
    }
  return s.value();
}

// Golden-section minimization of a convex function on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo, double hi) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = f(x2);
    }
  }
  double best = 0.5 * (a + b);
  for (double cand : {lo, hi})
    if (f(cand) < f(best)) best = cand;
  return best;
}

// Fills the dependent cells of a 2x2 or 3x3 coupling from its free upper-left
// (n-1)x(n-1) block.
bool complete_coupling(Matrix& pi, std::span<const double> p, std::span<const double> q) {
  const std::size_t n = p.size();
  const std::size_t k = n - 1;
  double corner = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    double row = p[i];
    for (std::size_t j = 0; j < k; ++j) row -= pi(i, j);
    pi(i, k) = row;
  }
  for (std::size_t j = 0; j < k; ++j) {
    double col = q[j];
    for (std::size_t i = 0; i < k; ++i) col -= pi(i, j);
    pi(k, j) = col;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(i == k && j == k)) corner -= pi(i, j);
  pi(k, k) = corner;
  for (double v : pi.data())
    if (v < -1e-15) return false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) pi(i, j) = std::max(pi(i, j), 0.0);
  return true;
}

}  // namespace

TransportResult coupling_kl_oracle(const Matrix& prior_joint, std::span<const double> p, std::span<const double> q,
                                   std::size_t grid_steps) {
  check_transport_shapes(prior_joint, p, q);
  const std::size_t n = p.size();
  if (n != q.size() || n < 2 || n > 3) fail(ErrorCode::OracleScaleExceeded, "KL oracle handles 2x2 and 3x3 only");
  if (grid_steps < 2 || grid_steps > 10000) fail(ErrorCode::EnumerationBudgetExceeded, "grid_steps must be 2..10^4");

  // Coarse grid over the free block.
  const std::size_t free = (n - 1) * (n - 1);
  const std::size_t steps = n == 2 ? grid_steps : std::min<std::size_t>(grid_steps, 24);
  Matrix best(n, n);
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(free, 0);
  Matrix trial(n, n);
  while (true) {
    for (std::size_t f = 0; f < free; ++f) {
      const std::size_t i = f / (n - 1), j = f % (n - 1);
      trial(i, j) = std::min(p[i], q[j]) * static_cast<double>(idx[f]) / static_cast<double>(steps);
    }
    if (complete_coupling(trial, p, q)) {
      const double v = kl_objective(trial, prior_joint);
      if (v < best_value) {
        best_value = v;
        best = trial;
      }
    }
    std::size_t f = 0;
    while (f < free && ++idx[f] > steps) idx[f++] = 0;
    if (f == free) break;
  }
  if (!std::isfinite(best_value)) fail(ErrorCode::InfeasibleSupport, "no coupling with finite divergence");

  // Line searches along pi_ij += t, pi_kl += t, pi_il -= t, pi_kj -= t.
  for (int sweep = 0; sweep < 20000; ++sweep) {
    const double before = best_value;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = i + 1; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t l = j + 1; l < n; ++l) {
            const double lo = -std::min(best(i, j), best(k, l));
            const double hi = std::min(best(i, l), best(k, j));
            auto moved = [&](double t) {
              Matrix m = best;
              m(i, j) += t;
              m(k, l) += t;
              m(i, l) -= t;
              m(k, j) -= t;
              return m;
            };
            const double t = golden_section([&](double s) { return kl_objective(moved(s), prior_joint); }, lo, hi);
            Matrix cand = moved(t);
            for (std::size_t a = 0; a < n; ++a)
              for (std::size_t b = 0; b < n; ++b) cand(a, b) = std::max(cand(a, b), 0.0);
            const double v = kl_objective(cand, prior_joint);
            if (v <= best_value) {
              best_value = v;
              best = cand;
            }
          }
    if (before - best_value < 1e-17) break;
  }
  return {best_value, best};
}

QuantileCoupling quantile_coupling_oracle(std::span<const double> points, std::span<const double> mass0,
                                          std::span<const double> mass1) {
  if (points.size() != mass0.size() || points.size() != mass1.size())
    fail(ErrorCode::DimensionMismatch, "quantile oracle inputs differ in length");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i] > points[i - 1])) fail(ErrorCode::InvalidArgument, "abscissae must be strictly increasing");
  const double total0 = compensated_sum(mass0);
  const double total1 = compensated_sum(mass1);

  QuantileCoupling out;
  CompensatedSum cost;
  std::size_t i = 0, j = 0;
  double left0 = mass0.empty() ? 0.0 : mass0[0] / total0;
  double left1 = mass1.empty() ? 0.0 : mass1[0] / total1;
  while (i < points.size() && j < points.size()) {
    const double m = std::min(left0, left1);
    if (m > 0.0) {
      out.cells.push_back({i, j, m});
      const double d = points[i] - points[j];
      cost.add(m * d * d / 2.0);
    }
    left0 -= m;
    left1 -= m;
    if (left0 <= 0.0 && ++i < points.size()) left0 = mass0[i] / total0;
    if (left1 <= 0.0 && ++j < points.size()) left1 = mass1[j] / total1;
  }
  out.cost = cost.value();
  return out;
}

}  // namespace sbridge::oracle
