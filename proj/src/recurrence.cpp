#include "bklab/recurrence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "bklab/error.hpp"
#include "bklab/summation.hpp"

namespace bklab {

namespace {

void require_finite(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::NonFiniteInput,
                "coefficients must be finite (a=" + std::to_string(a) +
                    ", b=" + std::to_string(b) + ")");
  }
}

std::complex<double> ipow(std::complex<double> base, std::size_t exponent) {
  std::complex<double> result{1.0, 0.0};
  while (exponent > 0) {
    if (exponent & 1U) result *= base;
    base *= base;
    exponent >>= 1U;
  }
  return result;
}

}  // namespace

Stability classify_stability(double a, double b) {
  require_finite(a, b);
  const bool lower = b > -1.0 + kStabilitySlack;
  const bool upper = b < 1.0 - std::abs(a) - kStabilitySlack;
  return (lower && upper) ? Stability::Stable : Stability::Unstable;
}

ARCoefficients::ARCoefficients(double a, double b)
    : a_(a), b_(b), stability_(classify_stability(a, b)) {}

CompanionSpectrum companion_spectrum(const ARCoefficients& coeffs) {
  const double a = coeffs.a();
  const double b = coeffs.b();

  CompanionSpectrum out;
  out.a = a;
  out.b = b;
  out.discriminant = a * a + 4.0 * b;
  out.mu = std::abs(out.discriminant) <= kRepeatedRootTolerance * std::max(1.0, a * a) ? 2 : 1;

  if (out.discriminant >= 0.0) {
    // Take the root that adds magnitudes, then recover the other from the
    // product l1 * l2 = -b to avoid cancellation.
    const double sq = std::sqrt(out.discriminant);
    const double r1 = (a >= 0.0) ? 0.5 * (a + sq) : 0.5 * (a - sq);
    const double r2 = (r1 != 0.0) ? -b / r1 : 0.0;
    out.lambda1 = {r1, 0.0};
    out.lambda2 = {r2, 0.0};
  } else {
    const double im = 0.5 * std::sqrt(-out.discriminant);
    out.lambda1 = {0.5 * a, im};
    out.lambda2 = {0.5 * a, -im};
  }
  out.rho = std::max(std::abs(out.lambda1), std::abs(out.lambda2));
  return out;
}

WeightTable weight_sequence(const ARCoefficients& coeffs, std::size_t horizon) {
  const double a = coeffs.a();
  const double b = coeffs.b();

  std::vector<double> u(horizon + 1);
  std::vector<double> cum(horizon + 1);
  CompensatedSum running;

  double prev = 0.0;  // u_{-1}
  for (std::size_t n = 0; n <= horizon; ++n) {
    double value;
    if (n == 0) {
      value = 1.0;
    } else {
      value = a * u[n - 1] + b * prev;
      prev = u[n - 1];
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::HorizonOverflow,
                  "weight u_" + std::to_string(n) + " overflows double precision");
    }
    u[n] = value;
    running.add(value);
    cum[n] = running.value();
    if (!std::isfinite(cum[n])) {
      throw Error(ErrorCode::HorizonOverflow,
                  "cumulative weight U(" + std::to_string(n) + ") overflows double precision");
    }
  }
  return WeightTable(coeffs, std::move(u), std::move(cum));
}

double weight_closed_form(const CompanionSpectrum& spectrum, std::size_t s) {
  if (spectrum.mu == 2) {
    return static_cast<double>(s + 1) * std::pow(0.5 * spectrum.a, static_cast<double>(s));
  }
  const std::complex<double> gap = spectrum.lambda1 - spectrum.lambda2;
  if (std::abs(gap) < 1e-10) {
    throw Error(ErrorCode::DegenerateSpectrum,
                "eigenvalues too close for the distinct-root closed form");
  }
  const std::complex<double> value =
      (ipow(spectrum.lambda1, s + 1) - ipow(spectrum.lambda2, s + 1)) / gap;
  if (std::abs(value.imag()) > 1e-9 * (1.0 + std::abs(value.real()))) {
    throw Error(ErrorCode::DegenerateSpectrum,
                "closed form left an imaginary residue of " + std::to_string(value.imag()));
  }
  return value.real();
}

std::pair<double, double> companion_power_column(const ARCoefficients& coeffs,
                                                  std::size_t s) {
  if (s < 1) {
    throw Error(ErrorCode::InvalidArgument, "companion power requires s >= 1");
  }
  using Mat = std::array<std::array<double, 2>, 2>;
  const Mat c{{{coeffs.a(), coeffs.b()}, {1.0, 0.0}}};
  const Mat m{{{1.0, 0.0}, {0.0, 0.0}}};

  auto mul = [](const Mat& x, const Mat& y) {
    Mat r{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
    return r;
  };

  Mat power = c;
  for (std::size_t k = 1; k < s; ++k) {
    power = mul(c, power);
    if (!std::isfinite(power[0][0]) || !std::isfinite(power[0][1])) {
      throw Error(ErrorCode::HorizonOverflow,
                  "C^" + std::to_string(k + 1) + " overflows double precision");
    }
  }
  const Mat column = mul(power, m);
  return {column[0][0], column[1][0]};
}

double koval_ratio(const CompanionSpectrum& spectrum, double u_s, double u_prev,
                   std::size_t s) {
  const double norm = std::hypot(u_s, u_prev);
  if (spectrum.rho <= 0.0 || norm <= 0.0 || s == 0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double log_envelope = static_cast<double>(s) * std::log(spectrum.rho) +
                              (spectrum.mu - 1) * std::log(static_cast<double>(s));
  return std::exp(std::log(norm) - log_envelope);
}

BoundReport bound_report(const ARCoefficients& coeffs, std::size_t horizon) {
  if (!coeffs.stable()) {
    throw Error(ErrorCode::UnstableCoefficients,
                "bound report requires -1 < b < 1 - |a|");
  }
  if (horizon < 50) {
    throw Error(ErrorCode::InvalidArgument, "bound report requires horizon >= 50");
  }
  const WeightTable table = weight_sequence(coeffs, horizon);
  const CompanionSpectrum spectrum = companion_spectrum(coeffs);

  BoundReport report;
  for (double value : table.cum()) report.l_star = std::max(report.l_star, std::abs(value));
  report.cum_limit = 1.0 / (1.0 - coeffs.a() - coeffs.b());

  if (spectrum.rho <= 0.0) {
    report.koval_ratio_min = std::numeric_limits<double>::quiet_NaN();
    report.koval_ratio_max = std::numeric_limits<double>::quiet_NaN();
    report.horizon_used = 0;
    return report;
  }

  report.koval_ratio_min = std::numeric_limits<double>::infinity();
  report.koval_ratio_max = 0.0;
  for (std::size_t s = 1; s <= horizon; ++s) {
    const double u_s = table.u(s);
    const double u_prev = table.u(s - 1);
    // Subnormal weights have lost their relative precision.
    if (std::hypot(u_s, u_prev) < std::numeric_limits<double>::min()) break;
    const double ratio = koval_ratio(spectrum, u_s, u_prev, s);
    report.koval_ratio_min = std::min(report.koval_ratio_min, ratio);
    report.koval_ratio_max = std::max(report.koval_ratio_max, ratio);
    report.horizon_used = s;
  }
  return report;
}

}  // namespace bklab
