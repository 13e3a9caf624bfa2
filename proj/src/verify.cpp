#include <algorithm>
#include <cmath>
#include <sstream>

#include "bklab/error.hpp"
#include "bklab/experiment.hpp"
#include "bklab/simulate.hpp"

namespace bklab {

namespace {

std::string fmt(double v) { return format_real(v); }

double relative_gap(double x, double y, double scale) {
  return std::abs(x - y) / std::max({std::abs(x), std::abs(y), scale, 1e-300});
}

CheckResult check_dual_representation(const ExperimentConfig& cfg) {
  double worst = 0.0;
  for (std::uint64_t v = 0; v < 20; ++v) {
    const auto theta = sample_block(NoiseSpec::standard_normal(), 1000,
                                    StreamKey{cfg.master_seed, StreamPurpose::SelfCheck, 1000, v});
    for (std::size_t n : {1UL, 2UL, 10UL, 100UL, 1000UL}) {
      worst = std::max(worst, representation_residual(
                                  cfg.coeffs, std::span<const double>(theta).first(n)));
    }
  }
  return {"dual representation", worst <= 1e-9, "max residual " + fmt(worst) + " (limit 1e-9)"};
}

CheckResult check_matrix_power(const ExperimentConfig& cfg) {
  const WeightTable table = weight_sequence(cfg.coeffs, 100);
  double worst = 0.0;
  for (std::size_t s = 1; s <= 100; ++s) {
    const auto [top, bottom] = companion_power_column(cfg.coeffs, s);
    worst = std::max(worst, relative_gap(top, table.u(s), 0.0));
    worst = std::max(worst, relative_gap(bottom, table.u(s - 1), 0.0));
  }
  return {"companion power column", worst <= 1e-12, "max relative error " + fmt(worst) + " (limit 1e-12)"};
}

CheckResult check_closed_form(const ExperimentConfig& cfg) {
  const CompanionSpectrum spectrum = companion_spectrum(cfg.coeffs);
  if (std::abs(spectrum.discriminant) <= 1e-6) {
    return {"closed form vs recurrence", true, "skipped: |discriminant| <= 1e-6"};
  }
  const WeightTable table = weight_sequence(cfg.coeffs, 200);
  double worst = 0.0;
  for (std::size_t s = 0; s <= 200; ++s) {
    const double scale = std::pow(spectrum.rho, static_cast<double>(s));
    worst = std::max(worst, relative_gap(weight_closed_form(spectrum, s), table.u(s), scale));
  }
  return {"closed form vs recurrence", worst <= 1e-8, "max relative error " + fmt(worst) + " (limit 1e-8)"};
}

CheckResult check_stability_grid() {
  std::size_t checked = 0;
  std::size_t disagreements = 0;
  for (int i = 0; i <= 400; ++i) {
    const double a = -2.0 + 0.01 * i;
    for (int j = 0; j <= 300; ++j) {
      const double b = -1.5 + 0.01 * j;
      const double band = std::min({std::abs(b + 1.0), std::abs(b - (1.0 - a)) / std::sqrt(2.0),
                                    std::abs(b - (1.0 + a)) / std::sqrt(2.0)});
      if (band < 1e-6) continue;
      const ARCoefficients c(a, b);
      const bool by_triangle = c.stable();
      const bool by_radius = companion_spectrum(c).rho < 1.0;
      ++checked;
      if (by_triangle != by_radius) ++disagreements;
    }
  }
  return {"stability triangle vs spectral radius", disagreements == 0,
          std::to_string(disagreements) + " disagreements over " + std::to_string(checked) + " points"};
}

CheckResult check_cumulative_limit(const ExperimentConfig& cfg) {
  const CompanionSpectrum spectrum = companion_spectrum(cfg.coeffs);
  const auto horizon = static_cast<std::size_t>(
      std::min(1e6, 50.0 * std::ceil(1.0 / (1.0 - spectrum.rho))));
  const WeightTable table = weight_sequence(cfg.coeffs, std::max<std::size_t>(horizon, 50));
  const double limit = 1.0 / (1.0 - cfg.coeffs.a() - cfg.coeffs.b());
  const double gap = std::abs(table.cum().back() - limit);
  return {"cumulative weight limit", gap <= 1e-6,
          "|U(" + std::to_string(table.horizon()) + ") - 1/(1-a-b)| = " + fmt(gap) + " (limit 1e-6)"};
}

CheckResult check_envelope(const ExperimentConfig& cfg) {
  const CompanionSpectrum spectrum = companion_spectrum(cfg.coeffs);
  if (spectrum.rho <= 0.0) {
    return {"growth envelope", true, "skipped: nilpotent companion matrix (rho = 0)"};
  }
  const BoundReport early = bound_report(cfg.coeffs, 50);
  const BoundReport full = bound_report(cfg.coeffs, 1000);
  const bool ok = full.koval_ratio_max <= 1.05 * early.koval_ratio_max && full.koval_ratio_min > 0.0;
  return {"growth envelope", ok,
          "ratio range [" + fmt(full.koval_ratio_min) + ", " + fmt(full.koval_ratio_max) +
              "], early max " + fmt(early.koval_ratio_max)};
}

CheckResult check_sampler(const ExperimentConfig& cfg) {
  const StreamKey key{cfg.master_seed, StreamPurpose::SelfCheck, 0, 0};
  const auto first = sample_block(cfg.noise, 100000, key);
  const auto second = sample_block(cfg.noise, 100000, key);
  const bool identical = first == second;
  std::string detail = identical ? "repeatable" : "streams differ";
  bool ok = identical;
  const MomentValue second_moment = absolute_moment(cfg.noise, 2.0);
  if (second_moment.finite()) {
    double sum = 0.0;
    for (double x : first) sum += x;
    const double mean = sum / static_cast<double>(first.size());
    const double se = std::sqrt(second_moment.value / static_cast<double>(first.size()));
    ok = ok && std::abs(mean) <= 4.0 * se;
    detail += ", mean " + fmt(mean) + " (4 SE = " + fmt(4.0 * se) + ")";
  }
  return {"noise sampler", ok, detail};
}

}  // namespace

std::vector<CheckResult> verify_invariants(const ExperimentConfig& config) {
  std::vector<CheckResult> results;
  auto guarded = [&](const char* name, auto&& check) {
    try {
      results.push_back(check());
    } catch (const Error& e) {
      results.push_back({name, false, std::string(error_code_name(e.code())) + ": " + e.what()});
    }
  };
  guarded("dual representation", [&] { return check_dual_representation(config); });
  guarded("companion power column", [&] { return check_matrix_power(config); });
  guarded("closed form vs recurrence", [&] { return check_closed_form(config); });
  guarded("stability triangle vs spectral radius", [&] { return check_stability_grid(); });
  if (config.coeffs.stable()) {
    guarded("cumulative weight limit", [&] { return check_cumulative_limit(config); });
    guarded("growth envelope", [&] { return check_envelope(config); });
  }
  guarded("noise sampler", [&] { return check_sampler(config); });
  return results;
}

}  // namespace bklab
