#include "sbridge/dynamic_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sbridge/error.hpp"
#include "sbridge/logmath.hpp"

namespace sbridge {

namespace {

constexpr double kMaximalMassSlack = 1e-9;

std::string pair1(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

void check_endpoint_support(const Matrix& log_g, const Distribution& nu0, const Distribution& nuN) {
  for (std::size_t i : nu0.support())
    for (std::size_t j : nuN.support())
      if (log_g(i, j) == kNegInf)
        fail(ErrorCode::InfeasibleSupport, "endpoint kernel G = M(0)...M(N-1) is zero at " + pair1(i, j) +
                                               ": no feasible path from node " + std::to_string(i + 1) + " to node " +
                                               std::to_string(j + 1) + " in N steps");
}

}  // namespace

BridgeProblem::BridgeProblem(PathMeasure prior, Distribution nu0, Distribution nuN)
    : prior_(std::move(prior)), nu0_(std::move(nu0)), nuN_(std::move(nuN)) {
  if (nu0_.size() != prior_.size() || nuN_.size() != prior_.size())
    fail(ErrorCode::DimensionMismatch, "marginals do not match the prior's node count");
  for (double l : prior_.log_initial())
    if (l == kNegInf) fail(ErrorCode::InvalidArgument, "prior initial weights must be positive on every node");
}

Matrix endpoint_kernel_log(const PathMeasure& prior) {
  Matrix g = prior.step(0).log_entries();
  for (std::size_t t = 1; t < prior.horizon(); ++t) g = log_matmul(g, prior.step(t).log_entries());
  return g;
}

PathMeasure BridgeSolution::as_path_measure() const {
  std::vector<Kernel> steps;
  steps.reserve(transitions.size());
  for (const auto& pi : transitions) steps.push_back(Kernel::from_linear(pi));
  return PathMeasure(nu0.weights(), std::move(steps));
}

BridgeSolution solve_bridge(const BridgeProblem& problem, const BridgeOptions& options) {
  const PathMeasure& prior = problem.prior();
  const std::size_t n = problem.size();
  const std::size_t horizon = problem.horizon();

  Matrix log_g = endpoint_kernel_log(prior);
  check_endpoint_support(log_g, problem.nu0(), problem.nuN());

  ScalingProblem scaling(Kernel::from_log(std::move(log_g)), problem.nu0(), problem.nuN());
  ScalingOptions so;
  so.tol = options.tol;
  so.max_iter = options.max_iter;
  const ScalingSolution sol = solve_schrodinger_system(scaling, so);

  Potentials pot;
  pot.log_phi.assign(horizon + 1, Vector());
  pot.log_phi_hat.assign(horizon + 1, Vector());
  pot.log_phi[horizon] = sol.log_phi1;
  pot.log_phi_hat[0] = sol.log_phi_hat0;
  for (std::size_t t = horizon; t-- > 0;) pot.log_phi[t] = log_apply(prior.step(t).log_entries(), pot.log_phi[t + 1]);
  for (std::size_t t = 0; t < horizon; ++t)
    pot.log_phi_hat[t + 1] = log_apply_transpose(prior.step(t).log_entries(), pot.log_phi_hat[t]);

  BridgeSolution out{std::move(pot), {}, Matrix(horizon + 1, n), problem.nu0(), {}};
  BridgeDiagnostics& diag = out.diagnostics;
  diag.iterations = sol.iterations;
  diag.final_step = sol.final_step;
  diag.kappa = sol.kappa;

  for (std::size_t t = 0; t < horizon; ++t) {
    const Matrix& lm = prior.step(t).log_entries();
    const Vector& here = out.potentials.log_phi[t];
    const Vector& next = out.potentials.log_phi[t + 1];
    Matrix pi(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      if (here[i] == kNegInf) {
        std::size_t support = 0;
        for (std::size_t j = 0; j < n; ++j) support += lm(i, j) != kNegInf;
        for (std::size_t j = 0; j < n; ++j)
          pi(i, j) = support ? (lm(i, j) != kNegInf ? 1.0 / static_cast<double>(support) : 0.0)
                             : 1.0 / static_cast<double>(n);
        diag.placeholder_rows.emplace_back(t, i);
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) {
        const double l = lm(i, j) + next[j];
        pi(i, j) = l == kNegInf ? 0.0 : std::exp(l - here[i]);
      }
    }
    out.transitions.push_back(std::move(pi));
  }

  for (std::size_t t = 0; t <= horizon; ++t) {
    const Vector row = out.potentials.marginal(t);
    for (std::size_t i = 0; i < n; ++i) out.marginal_flow(t, i) = row[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    diag.terminal_residual =
        std::max(diag.terminal_residual, std::abs(out.marginal_flow(horizon, i) - problem.nuN()[i]));
  for (std::size_t t = 0; t < horizon; ++t) {
    const Vector pushed = out.transitions[t].apply_transpose(out.marginal_flow.row(t));
    for (std::size_t j = 0; j < n; ++j)
      diag.flow_residual = std::max(diag.flow_residual, std::abs(pushed[j] - out.marginal_flow(t + 1, j)));
  }
  return out;
}

std::vector<PathMass> path_mass_table(const BridgeProblem& problem, const BridgeSolution& solution,
                                      std::size_t budget) {
  if (solution.transitions.size() != problem.horizon())
    fail(ErrorCode::HorizonMismatch, "solution horizon differs from the problem's");
  const PathMeasure measure = solution.as_path_measure();
  std::vector<PathMass> table;
  for_each_path(measure, std::nullopt, std::nullopt, budget, [&](const Path& p, double log_mass) {
    if (log_mass != kNegInf) table.push_back({p, std::exp(log_mass)});
  });
  sort_by_mass(table);
  return table;
}

std::vector<Path> maximal_mass_paths(const PathMeasure& measure, std::size_t x0, std::size_t xN, std::size_t budget) {
  std::vector<std::pair<Path, double>> all;
  double top = kNegInf;
  for_each_path(measure, x0, xN, budget, [&](const Path& p, double log_mass) {
    all.emplace_back(p, log_mass);
    top = std::max(top, log_mass);
  });
  if (all.empty())
    fail(ErrorCode::NoFeasiblePath, "no positive-mass path from node " + std::to_string(x0 + 1) + " to node " +
                                        std::to_string(xN + 1));
  const double cut = top + std::log1p(-kMaximalMassSlack);
  std::vector<Path> best;
  for (auto& [p, lm] : all)
    if (lm >= cut) best.push_back(std::move(p));
  std::sort(best.begin(), best.end());
  return best;
}

std::vector<Path> maximal_mass_paths(const BridgeSolution& solution, std::size_t x0, std::size_t xN,
                                     std::size_t budget) {
  return maximal_mass_paths(solution.as_path_measure(), x0, xN, budget);
}

StaticReduction::StaticReduction(PathMeasure prior, Matrix log_endpoint_kernel, Coupling endpoint_coupling)
    : prior_(std::move(prior)), log_g_(std::move(log_endpoint_kernel)), coupling_(std::move(endpoint_coupling)) {}

double StaticReduction::path_mass(const Path& path) const {
  const double lp = prior_.log_path_mass(path);
  if (lp == kNegInf) return 0.0;
  const std::size_t a = path.front(), b = path.back();
  const double w = coupling_(a, b);
  if (w == 0.0) return 0.0;
  // prior(x) / (mu0(x0) G(x0, xN)) * p*(x0, xN)
  return std::exp(lp - prior_.log_initial()[a] - log_g_(a, b)) * w;
}

std::vector<PathMass> StaticReduction::path_mass_table(std::size_t budget) const {
  std::vector<PathMass> table;
  for_each_path(prior_, std::nullopt, std::nullopt, budget, [&](const Path& p, double) {
    const double m = path_mass(p);
    if (m > 0.0) table.push_back({p, m});
  });
  sort_by_mass(table);
  return table;
}

StaticReduction static_reduction(const BridgeProblem& problem, const BridgeOptions& options) {
  const PathMeasure& prior = problem.prior();
  Matrix log_g = endpoint_kernel_log(prior);
  check_endpoint_support(log_g, problem.nu0(), problem.nuN());

  // Prior endpoint joint mu0(x0) G(x0, xN).
  Matrix joint = log_g;
  for (std::size_t i = 0; i < joint.rows(); ++i)
    for (std::size_t j = 0; j < joint.cols(); ++j) joint(i, j) += prior.log_initial()[i];

  ScalingProblem scaling(Kernel::from_log(std::move(joint)), problem.nu0(), problem.nuN());
  ScalingOptions so;
  so.tol = options.tol;
  so.max_iter = options.max_iter;
  const ScalingSolution sol = solve_schrodinger_system(scaling, so);
  return StaticReduction(prior, std::move(log_g), induced_coupling(scaling, sol));
}

double relative_entropy_on_paths(const PathMeasure& p, const PathMeasure& q, std::size_t budget) {
  if (p.horizon() != q.horizon()) fail(ErrorCode::HorizonMismatch, "path measures have different horizons");
  if (p.size() != q.size()) fail(ErrorCode::DimensionMismatch, "path measures live on different node sets");
  CompensatedSum d;
  bool infinite = false;
  for_each_path(p, std::nullopt, std::nullopt, budget, [&](const Path& path, double lp) {
    const double lq = q.log_path_mass(path);
    if (lq == kNegInf) {
      infinite = true;
      return;
    }
    d.add(std::exp(lp) * (lp - lq));
  });
  return infinite ? kInf : d.value();
}

double relative_entropy_on_paths(const std::vector<PathMass>& p, const PathMeasure& q) {
  CompensatedSum d;
  for (const auto& [path, mass] : p) {
    if (mass <= 0.0) continue;
    const double lq = q.log_path_mass(path);
    if (lq == kNegInf) return kInf;
    d.add(mass * (std::log(mass) - lq));
  }
  return d.value();
}

}  // namespace sbridge
