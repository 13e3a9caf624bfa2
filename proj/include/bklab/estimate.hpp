#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "bklab/noise.hpp"
#include "bklab/recurrence.hpp"

namespace bklab {

/// Exponents of the series sum_n n^{r/p-2} P{|S_n| > eps n^{1/p}}.
struct SeriesParams {
  double p = 1.0;
  double r = 2.0;
  double epsilon = 1.0;

  /// Throws InvalidParams unless 0 < p < 2, r >= p and epsilon > 0.
  void validate() const;
  double exponent() const noexcept { return r / p - 2.0; }

  friend bool operator==(const SeriesParams&, const SeriesParams&) = default;
};

/// Two-sided 95% normal quantile used for every Wilson interval.
inline constexpr double kWilsonZ95 = 1.959963984540054;

struct WilsonInterval {
  double low = 0.0;
  double high = 0.0;
};

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                               double z = kWilsonZ95);

struct TailEstimate {
  std::uint64_t n = 0;
  double p_hat = 0.0;
  std::uint64_t replications = 0;
  std::uint64_t exceedances = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool at_floor = false;  // no exceedance observed
};

/// Work partitioning for the Monte Carlo loops. Replicates are grouped in
/// blocks of block_size, each block drawing from its own stream, so the
/// result depends on block_size but never on the number of workers.
struct EstimatorOptions {
  std::size_t block_size = 4096;
  unsigned workers = 0;  // 0: hardware concurrency
};

/// Fraction of replicates with |S_n| > epsilon n^{1/p}, S_n computed from the
/// cumulative weights. Block j of the replicates draws from
/// StreamKey{master_seed, TailProbability, n, j}.
TailEstimate tail_probability(const ARCoefficients& coeffs, const NoiseSpec& noise,
                              const SeriesParams& params, std::uint64_t n,
                              std::uint64_t replications, std::uint64_t master_seed,
                              const EstimatorOptions& options = {});

/// Same, reusing a weight table whose horizon covers n - 1.
TailEstimate tail_probability(const WeightTable& weights, const NoiseSpec& noise,
                              const SeriesParams& params, std::uint64_t n,
                              std::uint64_t replications, std::uint64_t master_seed,
                              const EstimatorOptions& options = {});

enum class Verdict { Stabilized, FloorLimited, Growing };

std::string_view verdict_name(Verdict verdict);

/// Stabilisation threshold, relative to the CI-upper partial sum.
inline constexpr double kStabilizationFraction = 1e-3;
/// Share of at-floor terms (before stabilisation) that marks a run as
/// resolution-limited.
inline constexpr double kFloorFraction = 0.25;

/// Quantities behind the verdict. The last dyadic block is the set of grid
/// points n with N/2 < n <= N, N the largest grid point; the previous block
/// is N/4 < n <= N/2.
struct SeriesDiagnostics {
  double ci_total = 0.0;             // final CI-upper partial sum
  double last_block_mass = 0.0;      // point-estimate terms in the last block
  double last_block_ci_mass = 0.0;   // CI-upper terms in the last block
  double last_block_mean = 0.0;
  double previous_block_mean = 0.0;
  std::size_t stabilization_index = 0;  // first i with sum_{j>i} terms_j <= fraction * ci_total
  // At-floor terms strictly before stabilization_index.
  std::size_t floor_terms_before_stabilization = 0;
  bool stabilized = false;
  bool floor_limited = false;
  bool growing = false;
};

struct SeriesEstimate {
  SeriesParams params;
  std::vector<std::uint64_t> grid;
  std::vector<TailEstimate> tails;
  std::vector<double> terms;
  std::vector<double> partial_sums;
  std::vector<double> partial_sum_ci_high;
  SeriesDiagnostics diagnostics;
  Verdict verdict = Verdict::Stabilized;
};

/// 1..N when N <= 128, otherwise 1..128 followed by 256, 512, ... <= N.
std::vector<std::uint64_t> default_grid(std::uint64_t grid_max);

/// Fills terms, running sums, diagnostics and verdict of an estimate whose
/// params, grid and tails are already set. Exposed for testing the verdict
/// rules on synthetic inputs.
void assess_series(SeriesEstimate& estimate);

/// Per-point partial series over the grid (no interpolation between grid
/// points). Coefficients must be stable.
SeriesEstimate partial_series(const ARCoefficients& coeffs, const NoiseSpec& noise,
                              const SeriesParams& params,
                              const std::vector<std::uint64_t>& grid,
                              std::uint64_t replications, std::uint64_t master_seed,
                              const EstimatorOptions& options = {});

struct SlopeReport {
  double r = 0.0;
  std::vector<std::uint64_t> n_grid;
  std::vector<double> moments;  // Monte Carlo E|S_n|^r per grid point
  double slope = 0.0;           // least-squares slope of log moment vs log n
  double intercept = 0.0;
  double bound = 0.0;           // max(1, r/2)
};

/// Growth exponent of E|S_n|^r. Throws InfiniteMoment when E|theta|^r
/// diverges and InvalidArgument for fewer than 4 grid points.
SlopeReport moment_growth_check(const ARCoefficients& coeffs, const NoiseSpec& noise, double r,
                                const std::vector<std::uint64_t>& n_grid,
                                std::uint64_t replications, std::uint64_t master_seed,
                                const EstimatorOptions& options = {});

}  // namespace bklab
