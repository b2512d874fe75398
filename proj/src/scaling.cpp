#include "sbridge/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sbridge/error.hpp"
#include "sbridge/hilbert.hpp"
#include "sbridge/logmath.hpp"

namespace sbridge {

namespace {

constexpr double kLinearDynamicRange = 1e-8;

struct HalfCycle {
  Vector log_phi1;
  Vector log_phi0;
};

// phihat(0) = p / phi(0); phihat(1) = G^T phihat(0); phi(1) = q / phihat(1);
// phi(0)' = G phi(1).
HalfCycle cycle_log(const Matrix& lg, const Vector& lp, const Vector& lq, std::span<const double> lphi0) {
  const std::size_t n = lp.size();
  Vector lhat0(n);
  for (std::size_t i = 0; i < n; ++i) lhat0[i] = lp[i] == kNegInf ? kNegInf : lp[i] - lphi0[i];
  const Vector lhat1 = log_apply_transpose(lg, lhat0);
  Vector lphi1(n);
  for (std::size_t j = 0; j < n; ++j) lphi1[j] = lq[j] == kNegInf ? kNegInf : lq[j] - lhat1[j];
  Vector next = log_apply(lg, lphi1);
  return {std::move(lphi1), std::move(next)};
}

struct LinearCycle {
  Vector phi1;
  Vector phi0;
};

LinearCycle cycle_linear(const Matrix& g, const Vector& p, const Vector& q, const Vector& phi0) {
  const std::size_t n = p.size();
  Vector hat0(n);
  for (std::size_t i = 0; i < n; ++i) hat0[i] = p[i] == 0.0 ? 0.0 : p[i] / phi0[i];
  const Vector hat1 = g.apply_transpose(hat0);
  Vector phi1(n);
  for (std::size_t j = 0; j < n; ++j) phi1[j] = q[j] == 0.0 ? 0.0 : q[j] / hat1[j];
  Vector next = g.apply(phi1);
  return {std::move(phi1), std::move(next)};
}

constexpr double kLinearLogBound = 300.0;

bool linear_domain_safe(const Matrix& block) {
  double lo = kInf, hi = kNegInf;
  for (double v : block.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // The ratio test alone passes a 1x1 block whose single entry underflows.
  return lo - hi > std::log(kLinearDynamicRange) && lo > -kLinearLogBound && hi < kLinearLogBound;
}

}  // namespace

ScalingProblem::ScalingProblem(Kernel g, Distribution p, Distribution q)
    : g_(std::move(g)), p_(std::move(p)), q_(std::move(q)) {
  if (g_.size() != p_.size() || g_.size() != q_.size())
    fail(ErrorCode::DimensionMismatch, "kernel is " + std::to_string(g_.size()) + "x" + std::to_string(g_.size()) +
                                           " but marginals have " + std::to_string(p_.size()) + " and " +
                                           std::to_string(q_.size()) + " entries");
  for (std::size_t i : p_.support())
    for (std::size_t j : q_.support())
      if (!g_.support(i, j))
        fail(ErrorCode::NonPositiveKernel, "kernel must be strictly positive on supp(p) x supp(q); entry (" +
                                               std::to_string(i + 1) + "," + std::to_string(j + 1) + ") is zero");
}

Matrix ScalingProblem::support_block_log() const {
  const auto rows = p_.support();
  const auto cols = q_.support();
  Matrix block(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b) block(a, b) = g_.log_value(rows[a], cols[b]);
  return block;
}

Vector ScalingSolution::phi0() const { return exp_of(log_phi0); }
Vector ScalingSolution::phi_hat0() const { return exp_of(log_phi_hat0); }
Vector ScalingSolution::phi1() const { return exp_of(log_phi1); }
Vector ScalingSolution::phi_hat1() const { return exp_of(log_phi_hat1); }

Vector sinkhorn_cycle_log(const ScalingProblem& problem, std::span<const double> log_phi0) {
  if (log_phi0.size() != problem.size()) fail(ErrorCode::DimensionMismatch, "phi0 size mismatch");
  for (std::size_t i : problem.p().support())
    if (log_phi0[i] == kNegInf) fail(ErrorCode::InvalidArgument, "phi0 must be positive on supp(p)");
  return cycle_log(problem.kernel().log_entries(), problem.p().log_weights(), problem.q().log_weights(), log_phi0)
      .log_phi0;
}

Vector sinkhorn_cycle(const ScalingProblem& problem, std::span<const double> phi0) {
  for (double v : phi0)
    if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorCode::InvalidArgument, "phi0 must be finite and >= 0");
  return exp_of(sinkhorn_cycle_log(problem, log_of(phi0)));
}

ScalingSolution solve_schrodinger_system(const ScalingProblem& problem, const ScalingOptions& options) {
  if (!(options.tol > 0.0)) fail(ErrorCode::InvalidArgument, "tolerance must be positive");
  if (options.max_iter < 1) fail(ErrorCode::InvalidArgument, "max_iter must be >= 1");

  const std::size_t n = problem.size();
  const Matrix& lg = problem.kernel().log_entries();
  const Vector lp = problem.p().log_weights();
  const Vector lq = problem.q().log_weights();
  const Matrix block = problem.support_block_log();

  ScalingSolution sol;
  sol.kappa = contraction_ratio_from_diameter(projective_diameter_log(block));
  sol.linear_domain = options.domain == ScalingDomain::Linear ||
                      (options.domain == ScalingDomain::Auto && linear_domain_safe(block) &&
                       std::all_of(options.initial_log_phi0.begin(), options.initial_log_phi0.end(),
                                   [](double v) { return v == kNegInf || std::abs(v) < kLinearLogBound; }));

  Vector lphi0(n, 0.0);  // phi_0(0) = 1
  if (!options.initial_log_phi0.empty()) {
    if (options.initial_log_phi0.size() != n) fail(ErrorCode::DimensionMismatch, "initial phi0 size mismatch");
    for (std::size_t i : problem.p().support())
      if (!std::isfinite(options.initial_log_phi0[i]))
        fail(ErrorCode::InvalidArgument, "initial phi0 must be positive and finite on supp(p)");
    lphi0 = options.initial_log_phi0;
  }
  Vector lphi1;
  double step = kInf;
  long k = 0;

  if (sol.linear_domain) {
    const Matrix g = problem.kernel().linear();
    const Vector& p = problem.p().weights();
    const Vector& q = problem.q().weights();
    Vector phi0 = exp_of(lphi0);
    Vector phi1;
    while (k < options.max_iter) {
      LinearCycle c = cycle_linear(g, p, q, phi0);
      ++k;
      step = hilbert_distance(phi0, c.phi0);
      if (options.record_steps) sol.steps.push_back(step);
      phi0 = std::move(c.phi0);
      phi1 = std::move(c.phi1);
      if (step < options.tol) break;
    }
    lphi0 = log_of(phi0);
    lphi1 = log_of(phi1);
  } else {
    while (k < options.max_iter) {
      HalfCycle c = cycle_log(lg, lp, lq, lphi0);
      ++k;
      step = hilbert_distance_log(lphi0, c.log_phi0);
      if (options.record_steps) sol.steps.push_back(step);
      lphi0 = std::move(c.log_phi0);
      lphi1 = std::move(c.log_phi1);
      if (step < options.tol) break;
    }
  }
  if (!(step < options.tol))
    throw ConvergenceError(ErrorCode::MaxIterationsExceeded,
                           "Sinkhorn iteration did not reach tol " + std::to_string(options.tol) + " in " +
                               std::to_string(k) + " cycles (last Hilbert step " + std::to_string(step) + ")",
                           step, k);

  // Fix the ray: geometric mean of the nonzero entries of phi(0) is 1.
  double shift = 0.0;
  std::size_t count = 0;
  for (double v : lphi0)
    if (v != kNegInf) {
      shift += v;
      ++count;
    }
  shift = count ? shift / static_cast<double>(count) : 0.0;
  for (double& v : lphi0)
    if (v != kNegInf) v -= shift;
  for (double& v : lphi1)
    if (v != kNegInf) v -= shift;

  // Closing half-cycle: p-constraint exact, q-constraint is the residual.
  Vector lhat0(n);
  for (std::size_t i = 0; i < n; ++i) lhat0[i] = lp[i] == kNegInf ? kNegInf : lp[i] - lphi0[i];
  Vector lhat1 = log_apply_transpose(lg, lhat0);

  double residual = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double m = (lphi1[j] == kNegInf || lhat1[j] == kNegInf) ? 0.0 : std::exp(lphi1[j] + lhat1[j]);
    residual = std::max(residual, std::abs(m - problem.q()[j]));
  }

  sol.log_phi0 = std::move(lphi0);
  sol.log_phi1 = std::move(lphi1);
  sol.log_phi_hat0 = std::move(lhat0);
  sol.log_phi_hat1 = std::move(lhat1);
  sol.iterations = k;
  sol.final_step = step;
  sol.residual = residual;
  return sol;
}

Matrix coupling_matrix(const ScalingProblem& problem, const ScalingSolution& solution) {
  const std::size_t n = problem.size();
  const Matrix& lg = problem.kernel().log_entries();
  Matrix pi(n, n);
  CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double l = solution.log_phi_hat0[i] + lg(i, j) + solution.log_phi1[j];
      pi(i, j) = std::isnan(l) ? 0.0 : safe_exp(l);
      total.add(pi(i, j));
    }
  const double s = total.value();
  if (!(s > 0.0)) fail(ErrorCode::NotConverged, "induced coupling has no mass");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) pi(i, j) /= s;
  return pi;
}

Coupling induced_coupling(const ScalingProblem& problem, const ScalingSolution& solution) {
  Matrix pi = coupling_matrix(problem, solution);
  try {
    return Coupling(std::move(pi), problem.p(), problem.q());
  } catch (const Error& e) {
    fail(ErrorCode::NotConverged, std::string("scaling solution not converged: ") + e.what());
  }
}

}  // namespace sbridge
