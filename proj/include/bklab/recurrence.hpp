#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace bklab {

enum class Stability { Stable, Unstable };

/// Slack applied to both strict inequalities of the stability triangle
/// -1 < b < 1 - |a|. Points on the boundary are Unstable.
inline constexpr double kStabilitySlack = 1e-12;

/// Relative tolerance on |a^2 + 4b| below which the companion matrix is
/// treated as having a repeated eigenvalue.
inline constexpr double kRepeatedRootTolerance = 1e-10;

/// Coefficients (a, b) of xi_k = a xi_{k-1} + b xi_{k-2} + theta_k.
/// Construction rejects NaN/infinite values and caches the classification.
class ARCoefficients {
public:
  ARCoefficients(double a, double b);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  Stability stability() const noexcept { return stability_; }
  bool stable() const noexcept { return stability_ == Stability::Stable; }

  friend bool operator==(const ARCoefficients&, const ARCoefficients&) = default;

private:
  double a_;
  double b_;
  Stability stability_;
};

Stability classify_stability(double a, double b);
inline Stability classify_stability(const ARCoefficients& c) { return c.stability(); }

/// Eigenvalues of the companion matrix C = [[a, b], [1, 0]].
struct CompanionSpectrum {
  double a = 0.0;
  double b = 0.0;
  std::complex<double> lambda1;  // root of largest modulus
  std::complex<double> lambda2;
  double rho = 0.0;              // spectral radius
  int mu = 1;                    // multiplicity of the dominant eigenvalue
  double discriminant = 0.0;     // a^2 + 4b

  bool complex_roots() const noexcept { return discriminant < 0.0; }
};

CompanionSpectrum companion_spectrum(const ARCoefficients& coeffs);

/// Impulse-response weights u_0..u_N of u_n = a u_{n-1} + b u_{n-2} with
/// u_{-1} = 0, u_0 = 1, together with their running sums
/// U(j) = u_0 + ... + u_j.
class WeightTable {
public:
  const ARCoefficients& coeffs() const noexcept { return coeffs_; }
  std::size_t horizon() const noexcept { return u_.size() - 1; }
  const std::vector<double>& u() const noexcept { return u_; }
  const std::vector<double>& cum() const noexcept { return cum_; }
  double u(std::size_t n) const { return u_.at(n); }
  double cum(std::size_t j) const { return cum_.at(j); }

private:
  friend WeightTable weight_sequence(const ARCoefficients&, std::size_t);
  WeightTable(ARCoefficients coeffs, std::vector<double> u, std::vector<double> cum)
      : coeffs_(coeffs), u_(std::move(u)), cum_(std::move(cum)) {}

  ARCoefficients coeffs_;
  std::vector<double> u_;
  std::vector<double> cum_;
};

/// Fills u by the recurrence and U by compensated running summation.
/// Throws HorizonOverflow if any weight leaves the double range.
WeightTable weight_sequence(const ARCoefficients& coeffs, std::size_t horizon);

/// u_s from the eigenvalues: (l1^{s+1} - l2^{s+1}) / (l1 - l2) when mu = 1,
/// (s + 1) (a/2)^s when mu = 2. Throws DegenerateSpectrum when mu = 1 but the
/// roots are closer than 1e-10; use weight_sequence instead.
double weight_closed_form(const CompanionSpectrum& spectrum, std::size_t s);

/// First column of C^s M with M = diag(1, 0), computed by repeated 2x2
/// products. Equals (u_s, u_{s-1}). Requires s >= 1.
std::pair<double, double> companion_power_column(const ARCoefficients& coeffs,
                                                  std::size_t s);

/// Empirical stand-ins for the constants of the growth envelope
/// c1 rho^s s^{mu-1} <= ||C^s M|| <= c2 rho^s s^{mu-1}.
struct BoundReport {
  double l_star = 0.0;           // max_j |U(j)|
  double cum_limit = 0.0;        // 1 / (1 - a - b)
  double koval_ratio_min = 0.0;  // min_s ||C^s M|| / (rho^s s^{mu-1})
  double koval_ratio_max = 0.0;
  std::size_t horizon_used = 0;  // last s entering the ratio extrema
};

/// Envelope ratio R(s) = hypot(u_s, u_{s-1}) / (rho^s s^{mu-1}), evaluated
/// in log space. Returns NaN when rho = 0 or the weights underflow.
double koval_ratio(const CompanionSpectrum& spectrum, double u_s, double u_prev,
                   std::size_t s);

/// Requires stable coefficients and horizon >= 50. For the nilpotent case
/// a = b = 0 the ratios are undefined and reported as NaN.
BoundReport bound_report(const ARCoefficients& coeffs, std::size_t horizon);

}  // namespace bklab
