#include "bklab/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bklab/error.hpp"
#include "bklab/simulate.hpp"
#include "bklab/summation.hpp"
#include "parallel.hpp"

namespace bklab {

namespace {

constexpr std::uint64_t kMinReplications = 100;

std::size_t block_count(std::uint64_t replications, std::size_t block_size) {
  return static_cast<std::size_t>((replications + block_size - 1) / block_size);
}

std::uint64_t block_length(std::size_t block, std::uint64_t replications, std::size_t block_size) {
  const std::uint64_t start = static_cast<std::uint64_t>(block) * block_size;
  return std::min<std::uint64_t>(block_size, replications - start);
}

void require_stable(const ARCoefficients& coeffs) {
  if (!coeffs.stable()) {
    throw Error(ErrorCode::UnstableCoefficients,
                "coefficients a=" + std::to_string(coeffs.a()) + ", b=" +
                    std::to_string(coeffs.b()) +
                    " violate the stability condition -1 < b < 1 - |a|");
  }
}

void require_options(const EstimatorOptions& options) {
  if (options.block_size == 0) {
    throw Error(ErrorCode::InvalidArgument, "block size must be positive");
  }
}

}  // namespace

void SeriesParams::validate() const {
  if (!std::isfinite(p) || !std::isfinite(r) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidParams, "series parameters must be finite");
  }
  if (!(p > 0.0 && p < 2.0)) {
    throw Error(ErrorCode::InvalidParams,
                "p = " + std::to_string(p) + " violates 0 < p < 2");
  }
  if (!(r >= p)) {
    throw Error(ErrorCode::InvalidParams,
                "r = " + std::to_string(r) + " < p = " + std::to_string(p) + " violates r >= p");
  }
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::InvalidParams,
                "epsilon = " + std::to_string(epsilon) + " violates epsilon > 0");
  }
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0 || successes > trials) {
    throw Error(ErrorCode::InvalidArgument, "Wilson interval needs 0 <= successes <= trials > 0");
  }
  const double n = static_cast<double>(trials);
  const double p_hat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p_hat + z2 / (2.0 * n)) / denom;
  const double half = (z / denom) * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n));
  WilsonInterval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  ci.low = std::min(ci.low, p_hat);
  ci.high = std::max(ci.high, p_hat);
  return ci;
}

TailEstimate tail_probability(const ARCoefficients& coeffs, const NoiseSpec& noise,
                              const SeriesParams& params, std::uint64_t n,
                              std::uint64_t replications, std::uint64_t master_seed,
                              const EstimatorOptions& options) {
  require_stable(coeffs);
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "tail probability requires n >= 1");
  const WeightTable weights = weight_sequence(coeffs, n - 1);
  return tail_probability(weights, noise, params, n, replications, master_seed, options);
}

TailEstimate tail_probability(const WeightTable& weights, const NoiseSpec& noise,
                              const SeriesParams& params, std::uint64_t n,
                              std::uint64_t replications, std::uint64_t master_seed,
                              const EstimatorOptions& options) {
  require_stable(weights.coeffs());
  params.validate();
  noise.validate();
  require_options(options);
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "tail probability requires n >= 1");
  if (replications < kMinReplications) {
    throw Error(ErrorCode::InvalidArgument,
                "tail probability requires at least 100 replications");
  }
  if (weights.horizon() + 1 < n) {
    throw Error(ErrorCode::InsufficientHorizon,
                "weight table too short for n = " + std::to_string(n));
  }

  const double threshold = params.epsilon * std::pow(static_cast<double>(n), 1.0 / params.p);
  const std::size_t blocks = block_count(replications, options.block_size);

  auto counts = detail::run_blocks<std::uint64_t>(blocks, options.workers, [&](std::size_t block) {
    NoiseSampler sampler(noise, StreamKey{master_seed, StreamPurpose::TailProbability, n, block});
    std::vector<double> theta(n);
    std::uint64_t hits = 0;
    const std::uint64_t len = block_length(block, replications, options.block_size);
    for (std::uint64_t rep = 0; rep < len; ++rep) {
      sampler.fill(theta);
      if (std::abs(weighted_sum(theta, weights)) > threshold) ++hits;
    }
    return hits;
  });

  TailEstimate est;
  est.n = n;
  est.replications = replications;
  for (std::uint64_t c : counts) est.exceedances += c;
  est.p_hat = static_cast<double>(est.exceedances) / static_cast<double>(replications);
  const WilsonInterval ci = wilson_interval(est.exceedances, replications);
  est.ci_low = ci.low;
  est.ci_high = ci.high;
  est.at_floor = est.exceedances == 0;
  return est;
}

std::string_view verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::Stabilized: return "Stabilized";
    case Verdict::FloorLimited: return "FloorLimited";
    case Verdict::Growing: return "Growing";
  }
  return "Unknown";
}

std::vector<std::uint64_t> default_grid(std::uint64_t grid_max) {
  if (grid_max < 1) throw Error(ErrorCode::EmptyGrid, "grid_max must be >= 1");
  std::vector<std::uint64_t> grid;
  const std::uint64_t dense = std::min<std::uint64_t>(grid_max, 128);
  for (std::uint64_t n = 1; n <= dense; ++n) grid.push_back(n);
  for (std::uint64_t n = 256; n <= grid_max; n *= 2) grid.push_back(n);
  return grid;
}

void assess_series(SeriesEstimate& est) {
  const std::size_t m = est.grid.size();
  if (m == 0) throw Error(ErrorCode::EmptyGrid, "series grid is empty");
  if (est.tails.size() != m) {
    throw Error(ErrorCode::InvalidArgument, "tail estimates do not match the grid");
  }
  const double exponent = est.params.exponent();

  est.terms.assign(m, 0.0);
  est.partial_sums.assign(m, 0.0);
  est.partial_sum_ci_high.assign(m, 0.0);
  std::vector<double> ci_terms(m);
  CompensatedSum point_sum;
  CompensatedSum ci_sum;
  for (std::size_t i = 0; i < m; ++i) {
    const double weight = std::pow(static_cast<double>(est.grid[i]), exponent);
    est.terms[i] = weight * est.tails[i].p_hat;
    ci_terms[i] = weight * est.tails[i].ci_high;
    point_sum.add(est.terms[i]);
    ci_sum.add(ci_terms[i]);
    // Running sums of nonnegative terms; max() pins monotonicity against the
    // last-bit wobble of the compensated value.
    est.partial_sums[i] = i ? std::max(est.partial_sums[i - 1], point_sum.value()) : point_sum.value();
    est.partial_sum_ci_high[i] = std::max(
        {i ? est.partial_sum_ci_high[i - 1] : 0.0, ci_sum.value(), est.partial_sums[i]});
  }

  SeriesDiagnostics& d = est.diagnostics;
  d = SeriesDiagnostics{};
  d.ci_total = est.partial_sum_ci_high.back();
  const double budget = kStabilizationFraction * d.ci_total;

  const std::uint64_t top = est.grid.back();
  std::size_t last_count = 0;
  std::size_t previous_count = 0;
  CompensatedSum last_mass, last_ci_mass, previous_mass;
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint64_t n = est.grid[i];
    if (2 * n > top) {
      last_mass.add(est.terms[i]);
      last_ci_mass.add(ci_terms[i]);
      ++last_count;
    } else if (4 * n > top) {
      previous_mass.add(est.terms[i]);
      ++previous_count;
    }
  }
  d.last_block_mass = last_mass.value();
  d.last_block_ci_mass = last_ci_mass.value();
  d.last_block_mean = last_count ? d.last_block_mass / static_cast<double>(last_count) : 0.0;
  d.previous_block_mean =
      previous_count ? previous_mass.value() / static_cast<double>(previous_count) : 0.0;

  // Point mass remaining after each index, accumulated from the right.
  std::size_t index = m - 1;
  CompensatedSum remaining;
  for (std::size_t i = m; i-- > 0;) {
    if (remaining.value() > budget) break;
    index = i;
    remaining.add(est.terms[i]);
  }
  d.stabilization_index = index;
  for (std::size_t i = 0; i < index; ++i) {
    if (est.tails[i].at_floor) ++d.floor_terms_before_stabilization;
  }

  d.stabilized = d.last_block_mass <= budget;
  d.floor_limited = static_cast<double>(d.floor_terms_before_stabilization) >=
                    kFloorFraction * static_cast<double>(m);
  d.growing = last_count > 0 && previous_count > 0 && d.last_block_mean > 0.0 &&
              d.last_block_mean >= d.previous_block_mean;

  if (d.growing) {
    est.verdict = Verdict::Growing;
  } else if (d.floor_limited) {
    est.verdict = Verdict::FloorLimited;
  } else if (d.stabilized) {
    est.verdict = Verdict::Stabilized;
  } else {
    est.verdict = Verdict::Growing;
  }
}

SeriesEstimate partial_series(const ARCoefficients& coeffs, const NoiseSpec& noise,
                              const SeriesParams& params,
                              const std::vector<std::uint64_t>& grid,
                              std::uint64_t replications, std::uint64_t master_seed,
                              const EstimatorOptions& options) {
  require_stable(coeffs);
  params.validate();
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "series grid is empty");
  if (grid.front() < 1) throw Error(ErrorCode::InvalidArgument, "grid points must be >= 1");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "series grid must be strictly increasing");
    }
  }

  const WeightTable weights = weight_sequence(coeffs, grid.back() - 1);
  SeriesEstimate est;
  est.params = params;
  est.grid = grid;
  est.tails.reserve(grid.size());
  for (std::uint64_t n : grid) {
    est.tails.push_back(
        tail_probability(weights, noise, params, n, replications, master_seed, options));
  }
  assess_series(est);
  return est;
}

SlopeReport moment_growth_check(const ARCoefficients& coeffs, const NoiseSpec& noise, double r,
                                const std::vector<std::uint64_t>& n_grid,
                                std::uint64_t replications, std::uint64_t master_seed,
                                const EstimatorOptions& options) {
  require_stable(coeffs);
  require_options(options);
  const MomentValue moment = absolute_moment(noise, r);
  if (moment.infinite) {
    throw Error(ErrorCode::InfiniteMoment,
                "E|theta|^" + std::to_string(r) + " is infinite for " + describe(noise) +
                    "; the growth bound is vacuous");
  }
  if (n_grid.size() < 4) {
    throw Error(ErrorCode::InvalidArgument, "moment growth check needs at least 4 grid points");
  }
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1 || (i > 0 && n_grid[i] <= n_grid[i - 1])) {
      throw Error(ErrorCode::InvalidArgument,
                  "moment grid must be strictly increasing and start at n >= 1");
    }
  }
  if (replications < kMinReplications) {
    throw Error(ErrorCode::InvalidArgument, "moment growth check requires at least 100 replications");
  }

  const WeightTable weights = weight_sequence(coeffs, n_grid.back() - 1);
  SlopeReport report;
  report.r = r;
  report.n_grid = n_grid;
  report.bound = std::max(1.0, r / 2.0);

  const std::size_t blocks = block_count(replications, options.block_size);
  for (std::uint64_t n : n_grid) {
    auto partial = detail::run_blocks<double>(blocks, options.workers, [&](std::size_t block) {
      NoiseSampler sampler(noise, StreamKey{master_seed, StreamPurpose::MomentGrowth, n, block});
      std::vector<double> theta(n);
      CompensatedSum acc;
      const std::uint64_t len = block_length(block, replications, options.block_size);
      for (std::uint64_t rep = 0; rep < len; ++rep) {
        sampler.fill(theta);
        acc.add(std::pow(std::abs(weighted_sum(theta, weights)), r));
      }
      return acc.value();
    });
    CompensatedSum total;
    for (double v : partial) total.add(v);
    report.moments.push_back(total.value() / static_cast<double>(replications));
  }

  // Ordinary least squares of log moment on log n.
  const double k = static_cast<double>(n_grid.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    mean_x += std::log(static_cast<double>(n_grid[i]));
    mean_y += std::log(report.moments[i]);
  }
  mean_x /= k;
  mean_y /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const double dx = std::log(static_cast<double>(n_grid[i])) - mean_x;
    sxx += dx * dx;
    sxy += dx * (std::log(report.moments[i]) - mean_y);
  }
  report.slope = sxy / sxx;
  report.intercept = mean_y - report.slope * mean_x;
  return report;
}

}  // namespace bklab
