#include "bklab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bklab/error.hpp"
#include "bklab/summation.hpp"

namespace bklab {

Path simulate_path(const ARCoefficients& coeffs, std::span<const double> theta) {
  if (theta.empty()) {
    throw Error(ErrorCode::NonFiniteInput, "noise vector must be nonempty");
  }
  if (!std::all_of(theta.begin(), theta.end(), [](double t) { return std::isfinite(t); })) {
    throw Error(ErrorCode::NonFiniteInput, "noise vector has non-finite entries");
  }
  const double a = coeffs.a();
  const double b = coeffs.b();

  Path path{coeffs, std::vector<double>(theta.begin(), theta.end()), {}, 0.0};
  path.xi.resize(theta.size());

  double prev1 = 0.0;  // xi_{k-1}
  double prev2 = 0.0;  // xi_{k-2}
  CompensatedSum sum;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double xi = a * prev1 + b * prev2 + theta[k];
    path.xi[k] = xi;
    sum.add(xi);
    prev2 = prev1;
    prev1 = xi;
  }
  path.s_n = sum.value();
  return path;
}

double weighted_sum(std::span<const double> theta, const WeightTable& weights) {
  const std::size_t n = theta.size();
  if (n == 0) return 0.0;
  if (weights.horizon() + 1 < n) {
    throw Error(ErrorCode::InsufficientHorizon,
                "weight table horizon " + std::to_string(weights.horizon()) +
                    " is too short for n = " + std::to_string(n));
  }
  const std::vector<double>& cum = weights.cum();
  CompensatedSum sum;
  for (std::size_t k = 0; k < n; ++k) {
    // theta[k] is theta_{k+1}; its weight is U(n - (k+1)).
    sum.add(cum[n - 1 - k] * theta[k]);
  }
  return sum.value();
}

double representation_residual(const ARCoefficients& coeffs, std::span<const double> theta) {
  const Path path = simulate_path(coeffs, theta);
  const WeightTable weights = weight_sequence(coeffs, theta.size() - 1);
  const double alt = weighted_sum(theta, weights);
  return std::abs(path.s_n - alt) / std::max(1.0, std::abs(path.s_n));
}

}  // namespace bklab
