#pragma once

#include <span>
#include <vector>

#include "bklab/recurrence.hpp"

namespace bklab {

/// One realisation xi_1..xi_n of the zero-started AR(2) recursion driven by
/// theta, together with S_n = xi_1 + ... + xi_n.
struct Path {
  ARCoefficients coeffs;
  std::vector<double> theta;
  std::vector<double> xi;
  double s_n = 0.0;

  std::size_t n() const noexcept { return xi.size(); }
};

/// Direct recursion. Unstable coefficients are allowed; throws
/// NonFiniteInput for empty or non-finite theta.
Path simulate_path(const ARCoefficients& coeffs, std::span<const double> theta);

/// S_n as sum_k U(n-k) theta_k from precomputed cumulative weights.
/// Throws InsufficientHorizon when weights.horizon() < n - 1.
double weighted_sum(std::span<const double> theta, const WeightTable& weights);

/// |S_n(direct) - S_n(weighted)| / max(1, |S_n(direct)|).
double representation_residual(const ARCoefficients& coeffs, std::span<const double> theta);

}  // namespace bklab
