#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sbridge/core.hpp"
#include "sbridge/scaling.hpp"

namespace sbridge {

// Uniform grid on [a, b] with m points; h = (b - a)/(m - 1).
class Grid {
 public:
  Grid(double a, double b, std::size_t m);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  std::size_t size() const noexcept { return points_.size(); }
  double weight() const noexcept { return h_; }
  const Vector& points() const noexcept { return points_; }
  double operator[](std::size_t i) const { return points_[i]; }

 private:
  double a_, b_, h_;
  Vector points_;
};

// [lo - 6 sqrt(eps), hi + 6 sqrt(eps)] with m points.
Grid width_rule_grid(double support_lo, double support_hi, double epsilon, std::size_t m);

// Nonnegative values on grid points with sum(values) h = 1.
class GridDensity {
 public:
  // Checks nonnegativity and the unit integral to 1e-10.
  static GridDensity validate(const Grid& grid, std::span<const double> values);
  // Scales nonnegative values to unit integral.
  static GridDensity normalize(const Grid& grid, std::span<const double> values);
  static GridDensity gaussian(const Grid& grid, double mean, double variance);

  std::size_t size() const noexcept { return values_.size(); }
  double weight() const noexcept { return h_; }
  const Vector& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  // Cell masses values * h as a probability vector.
  Distribution masses() const;
  double integral() const;
  double mean(const Grid& grid) const;

 private:
  GridDensity(Vector values, double h) : values_(std::move(values)), h_(h) {}
  Vector values_;
  double h_;
};

// k_ij = (2 pi eps (t-s))^{-1/2} exp(-(x_i - x_j)^2 / (2 eps (t-s))) h.
Kernel heat_kernel(const Grid& grid, double epsilon, double s, double t);

inline constexpr std::size_t kDefaultInterpolationTimes = 11;

std::vector<double> equispaced_times(std::size_t count = kDefaultInterpolationTimes);

struct Interpolation {
  std::vector<double> times;
  std::vector<GridDensity> densities;
  ScalingSolution scaling;
};

// rho(t) = phi(t) phihat(t) / h with phi(t) = K(t,1) phi(1) and
// phihat(t) = K(0,t)^T phihat(0), renormalized.
Interpolation entropic_interpolation(const Grid& grid, const GridDensity& rho0, const GridDensity& rho1,
                                     double epsilon, const std::vector<double>& times,
                                     const ScalingOptions& options = {});

struct CostPoint {
  double epsilon = 0.0;
  double transport_cost = 0.0;  // sum (x_i - x_j)^2 / 2 pi_ij
  long iterations = 0;
  double residual = 0.0;
};

// Epsilons must be positive and strictly decreasing. Each solve is warm-started
// from the previous one's potentials rescaled by eps_prev / eps.
std::vector<CostPoint> entropic_cost_curve(const Grid& grid, const GridDensity& rho0, const GridDensity& rho1,
                                           const std::vector<double>& epsilons, const ScalingOptions& options = {});

// Endpoint coupling (cell masses) of the one-step problem at a given epsilon.
Matrix entropic_coupling(const Grid& grid, const GridDensity& rho0, const GridDensity& rho1, double epsilon,
                         const ScalingOptions& options = {});

double quadratic_cost(const Grid& grid, const Matrix& coupling);

}  // namespace sbridge
