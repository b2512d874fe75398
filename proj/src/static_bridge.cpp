#include "sbridge/static_bridge.hpp"

#include <cmath>

#include "sbridge/error.hpp"
#include "sbridge/logmath.hpp"
#include "sbridge/oracle.hpp"

namespace sbridge {

namespace {
constexpr std::size_t kRationalDenominatorLimit = 64;
}

EnergyLandscape::EnergyLandscape(Vector energies, double temperature)
    : energies_(std::move(energies)), temperature_(temperature) {
  if (energies_.empty()) fail(ErrorCode::InvalidArgument, "energy landscape must be nonempty");
  for (double e : energies_)
    if (!std::isfinite(e) || e < 0.0) fail(ErrorCode::NegativeEntry, "energies must be finite and >= 0");
  if (!(temperature_ > 0.0) || !std::isfinite(temperature_))
    fail(ErrorCode::NonPositiveTemperature, "temperature must be positive");
}

double free_energy(const Distribution& pi, const EnergyLandscape& landscape) {
  if (pi.size() != landscape.size()) fail(ErrorCode::DimensionMismatch, "distribution and landscape differ in size");
  CompensatedSum f;
  for (std::size_t x = 0; x < pi.size(); ++x) {
    f.add(landscape.energies()[x] * pi[x]);
    f.add(landscape.temperature() * xlogx(pi[x]));
  }
  return f.value();
}

double log_partition(const EnergyLandscape& landscape) {
  Vector terms(landscape.size());
  for (std::size_t x = 0; x < terms.size(); ++x) terms[x] = -landscape.energies()[x] / landscape.temperature();
  return log_sum_exp(terms);
}

Distribution boltzmann_distribution(const EnergyLandscape& landscape) {
  const double log_z = log_partition(landscape);
  Vector w(landscape.size());
  for (std::size_t x = 0; x < w.size(); ++x)
    w[x] = std::exp(-landscape.energies()[x] / landscape.temperature() - log_z);
  return Distribution::validate(w);
}

TransportInstance::TransportInstance(Matrix cost, Distribution p, Distribution q, double epsilon)
    : cost_(std::move(cost)), p_(std::move(p)), q_(std::move(q)), epsilon_(epsilon) {
  if (cost_.rows() != p_.size() || cost_.cols() != q_.size())
    fail(ErrorCode::DimensionMismatch, "cost matrix does not match marginals");
  for (double c : cost_.data())
    if (!std::isfinite(c) || c < 0.0) fail(ErrorCode::NegativeEntry, "costs must be finite and >= 0");
  if (!(epsilon_ >= 0.0) || !std::isfinite(epsilon_))
    fail(ErrorCode::InvalidArgument, "regularization must be finite and >= 0");
}

Kernel transport_kernel(const Matrix& cost, double epsilon) {
  if (!(epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "transport kernel needs epsilon > 0");
  Matrix lg(cost.rows(), cost.cols());
  for (std::size_t i = 0; i < cost.rows(); ++i)
    for (std::size_t j = 0; j < cost.cols(); ++j) lg(i, j) = -cost(i, j) / epsilon;
  return Kernel::from_log(std::move(lg));
}

double regularized_objective(const Matrix& cost, const Matrix& joint, double epsilon) {
  CompensatedSum j;
  for (std::size_t a = 0; a < cost.rows(); ++a)
    for (std::size_t b = 0; b < cost.cols(); ++b) {
      j.add(cost(a, b) * joint(a, b));
      j.add(epsilon * xlogx(joint(a, b)));
    }
  return j.value();
}

RegularizedTransport regularized_ot(const TransportInstance& instance, const ScalingOptions& options) {
  const Matrix& c = instance.cost();
  if (instance.epsilon() == 0.0) {
    const double value = ot_lp_value(instance);
    const auto d = oracle::common_denominator(instance.p().weights(), instance.q().weights(), kRationalDenominatorLimit);
    Matrix plan = d ? oracle::assignment_ot_oracle(c, instance.p().weights(), instance.q().weights()).coupling
                    : oracle::vertex_enumeration_ot_oracle(c, instance.p().weights(), instance.q().weights()).coupling;
    return {Coupling(std::move(plan), instance.p(), instance.q()), value, value, kInf, 0};
  }
  if (!c.square()) fail(ErrorCode::DimensionMismatch, "regularized transport needs a square cost matrix");

  ScalingProblem problem(transport_kernel(c, instance.epsilon()), instance.p(), instance.q());
  const ScalingSolution sol = solve_schrodinger_system(problem, options);
  Coupling pi = induced_coupling(problem, sol);

  CompensatedSum cost_sum;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) cost_sum.add(c(i, j) * pi(i, j));

  // D(pi || pi_B) with pi_B = G / sum G.
  Vector lg_flat(c.rows() * c.cols());
  for (std::size_t k = 0; k < lg_flat.size(); ++k) lg_flat[k] = -c.data()[k] / instance.epsilon();
  const double log_mass = log_sum_exp(lg_flat);
  CompensatedSum kl;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j)
      if (pi(i, j) > 0.0) kl.add(pi(i, j) * (std::log(pi(i, j)) + c(i, j) / instance.epsilon() + log_mass));

  const double value = regularized_objective(c, pi.joint(), instance.epsilon());
  return {std::move(pi), value, cost_sum.value(), kl.value(), sol.iterations};
}

double ot_lp_value(const TransportInstance& instance) {
  const auto& p = instance.p().weights();
  const auto& q = instance.q().weights();
  if (oracle::common_denominator(p, q, kRationalDenominatorLimit) != 0)
    return oracle::assignment_ot_oracle(instance.cost(), p, q).value;
  if (p.size() <= 5 && q.size() <= 5) return oracle::vertex_enumeration_ot_oracle(instance.cost(), p, q).value;
  fail(ErrorCode::OracleScaleExceeded,
       "exact LP value needs marginals with denominator <= 64 or at most 5 states per side");
}

}  // namespace sbridge
