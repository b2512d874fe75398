#include "sbridge/grid1d.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sbridge/error.hpp"
#include "sbridge/logmath.hpp"
#include "sbridge/threads.hpp"

namespace sbridge {

namespace {

constexpr double kIntegralSlack = 1e-10;

void check_density(const Grid& grid, const GridDensity& rho, const char* name) {
  if (rho.size() != grid.size())
    fail(ErrorCode::DimensionMismatch, std::string(name) + " has " + std::to_string(rho.size()) +
                                           " values for a grid of " + std::to_string(grid.size()));
  if (std::abs(rho.weight() - grid.weight()) > 1e-15 * std::max(1.0, grid.weight()))
    fail(ErrorCode::DimensionMismatch, std::string(name) + " was built on a different grid");
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
}

GridDensity from_masses(const Grid& grid, const Vector& masses) {
  Vector v(masses.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = masses[i] / grid.weight();
  return GridDensity::normalize(grid, v);
}

}  // namespace

Grid::Grid(double a, double b, std::size_t m) : a_(a), b_(b), h_(0.0) {
  if (m < 2) fail(ErrorCode::InvalidArgument, "grid needs m >= 2 points");
  if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) fail(ErrorCode::InvalidArgument, "grid needs a < b");
  h_ = (b - a) / static_cast<double>(m - 1);
  points_.resize(m);
  for (std::size_t i = 0; i < m; ++i) points_[i] = a + static_cast<double>(i) * h_;
  points_[m - 1] = b;
}

Grid width_rule_grid(double support_lo, double support_hi, double epsilon, std::size_t m) {
  check_epsilon(epsilon);
  const double pad = 6.0 * std::sqrt(epsilon);
  return Grid(support_lo - pad, support_hi + pad, m);
}

GridDensity GridDensity::validate(const Grid& grid, std::span<const double> values) {
  if (values.size() != grid.size())
    fail(ErrorCode::DimensionMismatch, "density has " + std::to_string(values.size()) + " values for a grid of " +
                                           std::to_string(grid.size()));
  CompensatedSum s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) fail(ErrorCode::InvalidArgument, "density value is not finite");
    if (values[i] < 0.0) fail(ErrorCode::NegativeEntry, "density value " + std::to_string(i + 1) + " is negative");
    s.add(values[i]);
  }
  const double integral = s.value() * grid.weight();
  if (std::abs(integral - 1.0) > kIntegralSlack)
    fail(ErrorCode::NotNormalized, "density integrates to " + std::to_string(integral) + ", not 1");
  return GridDensity(Vector(values.begin(), values.end()), grid.weight());
}

GridDensity GridDensity::normalize(const Grid& grid, std::span<const double> values) {
  if (values.size() != grid.size())
    fail(ErrorCode::DimensionMismatch, "density has " + std::to_string(values.size()) + " values for a grid of " +
                                           std::to_string(grid.size()));
  CompensatedSum s;
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "density value is not finite");
    if (v < 0.0) fail(ErrorCode::NegativeEntry, "density values must be >= 0");
    s.add(v);
  }
  const double integral = s.value() * grid.weight();
  if (!(integral > 0.0)) fail(ErrorCode::InvalidArgument, "density has no mass on the grid");
  Vector out(values.begin(), values.end());
  for (double& v : out) v /= integral;
  return GridDensity(std::move(out), grid.weight());
}

GridDensity GridDensity::gaussian(const Grid& grid, double mean, double variance) {
  if (!(variance > 0.0)) fail(ErrorCode::InvalidArgument, "gaussian variance must be positive");
  Vector v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double z = grid[i] - mean;
    v[i] = std::exp(-z * z / (2.0 * variance));
  }
  return normalize(grid, v);
}

Distribution GridDensity::masses() const {
  Vector m(values_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = values_[i] * h_;
  CompensatedSum s;
  for (double x : m) s.add(x);
  for (double& x : m) x /= s.value();
  return Distribution::validate(m);
}

double GridDensity::integral() const { return compensated_sum(values_) * h_; }

double GridDensity::mean(const Grid& grid) const {
  CompensatedSum s;
  for (std::size_t i = 0; i < values_.size(); ++i) s.add(grid[i] * values_[i] * h_);
  return s.value();
}

Kernel heat_kernel(const Grid& grid, double epsilon, double s, double t) {
  check_epsilon(epsilon);
  if (!(s >= 0.0 && s < t && t <= 1.0)) fail(ErrorCode::InvalidArgument, "heat kernel needs 0 <= s < t <= 1");
  const double var = epsilon * (t - s);
  const double lnorm = -0.5 * std::log(2.0 * std::numbers::pi * var) + std::log(grid.weight());
  const std::size_t m = grid.size();
  Matrix lk(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double d = grid[i] - grid[j];
      lk(i, j) = lnorm - d * d / (2.0 * var);
    }
  return Kernel::from_log(std::move(lk));
}

std::vector<double> equispaced_times(std::size_t count) {
  if (count < 2) fail(ErrorCode::InvalidArgument, "need at least two time points");
  std::vector<double> t(count);
  for (std::size_t k = 0; k < count; ++k) t[k] = static_cast<double>(k) / static_cast<double>(count - 1);
  t.back() = 1.0;
  return t;
}

Interpolation entropic_interpolation(const Grid& grid, const GridDensity& rho0, const GridDensity& rho1,
                                     double epsilon, const std::vector<double>& times, const ScalingOptions& options) {
  check_epsilon(epsilon);
  check_density(grid, rho0, "rho0");
  check_density(grid, rho1, "rho1");
  for (double t : times)
    if (!(t >= 0.0 && t <= 1.0)) fail(ErrorCode::InvalidArgument, "interpolation times must lie in [0, 1]");

  const ScalingProblem problem(heat_kernel(grid, epsilon, 0.0, 1.0), rho0.masses(), rho1.masses());
  Interpolation out{times, {}, solve_schrodinger_system(problem, options)};
  const ScalingSolution& sol = out.scaling;

  std::vector<Vector> masses(times.size());
  parallel_for(times.size(), [&](std::size_t k) {
    const double t = times[k];
    Vector lphi, lhat;
    if (t >= 1.0) {
      lphi = sol.log_phi1;
      lhat = sol.log_phi_hat1;
    } else if (t <= 0.0) {
      lphi = sol.log_phi0;
      lhat = sol.log_phi_hat0;
    } else {
      lphi = log_apply(heat_kernel(grid, epsilon, t, 1.0).log_entries(), sol.log_phi1);
      lhat = log_apply_transpose(heat_kernel(grid, epsilon, 0.0, t).log_entries(), sol.log_phi_hat0);
    }
    Vector m(lphi.size());
    for (std::size_t i = 0; i < m.size(); ++i)
      m[i] = (lphi[i] == kNegInf || lhat[i] == kNegInf) ? 0.0 : std::exp(lphi[i] + lhat[i]);
    masses[k] = std::move(m);
  });
  for (const auto& m : masses) out.densities.push_back(from_masses(grid, m));
  return out;
}

Matrix entropic_coupling(const Grid& grid, const GridDensity& rho0, const GridDensity& rho1, double epsilon,
                         const ScalingOptions& options) {
  check_epsilon(epsilon);
  check_density(grid, rho0, "rho0");
  check_density(grid, rho1, "rho1");
  const ScalingProblem problem(heat_kernel(grid, epsilon, 0.0, 1.0), rho0.masses(), rho1.masses());
  return coupling_matrix(problem, solve_schrodinger_system(problem, options));
}

double quadratic_cost(const Grid& grid, const Matrix& coupling) {
  if (coupling.rows() != grid.size() || coupling.cols() != grid.size())
    fail(ErrorCode::DimensionMismatch, "coupling does not match the grid");
  CompensatedSum s;
  for (std::size_t i = 0; i < coupling.rows(); ++i)
    for (std::size_t j = 0; j < coupling.cols(); ++j) {
      const double d = grid[i] - grid[j];
      s.add(0.5 * d * d * coupling(i, j));
    }
  return s.value();
}

std::vector<CostPoint> entropic_cost_curve(const Grid& grid, const GridDensity& rho0, const GridDensity& rho1,
                                           const std::vector<double>& epsilons, const ScalingOptions& options) {
  check_density(grid, rho0, "rho0");
  check_density(grid, rho1, "rho1");
  if (epsilons.empty()) fail(ErrorCode::InvalidArgument, "epsilon list is empty");
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    check_epsilon(epsilons[k]);
    if (k > 0 && !(epsilons[k] < epsilons[k - 1]))
      fail(ErrorCode::InvalidArgument, "epsilon list must be strictly decreasing");
  }
  const Distribution p = rho0.masses();
  const Distribution q = rho1.masses();
  std::vector<CostPoint> out;
  Vector warm;
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    const double eps = epsilons[k];
    const ScalingProblem problem(heat_kernel(grid, eps, 0.0, 1.0), p, q);
    ScalingOptions opts = options;
    if (!warm.empty()) {
      const double r = epsilons[k - 1] / eps;
      for (double& v : warm)
        if (v != kNegInf) v *= r;
      opts.initial_log_phi0 = std::move(warm);
    }
    const ScalingSolution sol = solve_schrodinger_system(problem, opts);
    out.push_back({eps, quadratic_cost(grid, coupling_matrix(problem, sol)), sol.iterations, sol.residual});
    warm = sol.log_phi0;
  }
  return out;
}

}  // namespace sbridge
