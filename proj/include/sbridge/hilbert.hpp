#pragma once

#include <span>

#include "sbridge/core.hpp"
#include "sbridge/matrix.hpp"

namespace sbridge {

// Hilbert projective distance on the nonnegative orthant,
//   d_H(x, y) = log( max_i x_i/y_i / min_i x_i/y_i ).
// Coordinates where both vectors vanish are ignored; a zero facing a positive
// entry puts the rays at infinite distance.
double hilbert_distance(std::span<const double> x, std::span<const double> y);
// Same metric on log-coordinates (-inf for zero).
double hilbert_distance_log(std::span<const double> log_x, std::span<const double> log_y);

// Thompson part metric, log max{ M(x,y), 1/m(x,y) }. Not scale invariant.
double thompson_distance(std::span<const double> x, std::span<const double> y);

// sup over quadruples of log(g_ij g_kl / (g_il g_kj)) for a strictly positive
// (possibly rectangular) block given in log form.
double projective_diameter_log(const Matrix& log_g);
double projective_diameter(const Kernel& kernel);

// Birkhoff contraction ratio tanh(diameter / 4).
double contraction_ratio(const Kernel& kernel);
double contraction_ratio_from_diameter(double diameter);

}  // namespace sbridge
