#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bklab/estimate.hpp"
#include "bklab/noise.hpp"
#include "bklab/recurrence.hpp"

namespace bklab {

/// Everything one experiment needs: the AR(2) coefficients, the innovation
/// law, the series exponents and the Monte Carlo budget.
///
/// Text form is line-oriented `key = value` with `#` comments. Keys:
///   a, b, p, r, epsilon, noise.family        required
///   noise.param1, noise.param2               family parameters
///   grid_max (128), replications (100000), seed (1), output (bklab_run)
struct ExperimentConfig {
  ARCoefficients coeffs{0.0, 0.0};
  NoiseSpec noise;
  SeriesParams params;
  std::uint64_t grid_max = 128;
  std::uint64_t replications = 100000;
  std::uint64_t master_seed = 1;
  std::string output = "bklab_run";

  /// Throws ValidationError naming the violated condition.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
std::string render_config(const ExperimentConfig& config);

/// %.17g, the shortest fixed-width format that round-trips every double.
std::string format_real(double value);

/// Header n,p_hat,ci_low,ci_high,term,partial_sum,partial_sum_ci_high,at_floor
/// followed by one LF-terminated row per grid point.
std::string emit_series_csv(const SeriesEstimate& estimate);
std::string emit_spectrum_csv(const ARCoefficients& coeffs, const CompanionSpectrum& spectrum,
                              const BoundReport& bound);
std::string emit_weights_csv(const WeightTable& table);

/// Human-readable spectrum and envelope summary.
std::string describe_spectrum(const ARCoefficients& coeffs, const CompanionSpectrum& spectrum,
                              const BoundReport& bound);

/// `paths` sample paths of length grid_max; columns path,k,theta,xi,partial_sum.
std::string emit_paths_csv(const ExperimentConfig& config, std::uint64_t paths);

int verdict_exit_code(Verdict verdict) noexcept;

/// Horizon of the bound report produced by run_experiment.
inline constexpr std::size_t kReportHorizon = 1000;
/// Probe paths (and their length) of the representation self-check.
inline constexpr std::uint64_t kProbePaths = 10;
inline constexpr std::uint64_t kProbeLength = 1000;

struct RunOutcome {
  Verdict verdict = Verdict::Stabilized;
  SeriesEstimate series;
  std::string summary;
  std::vector<std::string> written;  // files, in order of writing
};

/// Full pipeline: stability, spectrum, bound report, representation
/// self-check, partial series and (when E|theta|^r < inf) the moment growth
/// check. Writes <output>.series.csv, <output>.spectrum.csv and
/// <output>.summary.txt.
RunOutcome run_experiment(const ExperimentConfig& config, const EstimatorOptions& options = {});

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Desk-scale self-check of the deterministic identities and sampler
/// properties, seeded from the config.
std::vector<CheckResult> verify_invariants(const ExperimentConfig& config);

}  // namespace bklab
