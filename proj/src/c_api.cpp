#include "bklab/bklab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "bklab/error.hpp"
#include "bklab/estimate.hpp"
#include "bklab/experiment.hpp"
#include "bklab/simulate.hpp"

struct bk_config {
  bklab::ExperimentConfig value;
};

struct bk_series {
  bklab::SeriesEstimate value;
};

namespace {

thread_local std::string g_last_error;

bk_status to_status(bklab::ErrorCode code) {
  using bklab::ErrorCode;
  switch (code) {
    case ErrorCode::NonFiniteInput: return BK_ERR_NON_FINITE_INPUT;
    case ErrorCode::HorizonOverflow: return BK_ERR_HORIZON_OVERFLOW;
    case ErrorCode::DegenerateSpectrum: return BK_ERR_DEGENERATE_SPECTRUM;
    case ErrorCode::UnstableCoefficients: return BK_ERR_UNSTABLE_COEFFICIENTS;
    case ErrorCode::InvalidOrder: return BK_ERR_INVALID_ORDER;
    case ErrorCode::InvalidNoise: return BK_ERR_INVALID_NOISE;
    case ErrorCode::InsufficientHorizon: return BK_ERR_INSUFFICIENT_HORIZON;
    case ErrorCode::InvalidParams: return BK_ERR_INVALID_PARAMS;
    case ErrorCode::EmptyGrid: return BK_ERR_EMPTY_GRID;
    case ErrorCode::InfiniteMoment: return BK_ERR_INFINITE_MOMENT;
    case ErrorCode::ParseError: return BK_ERR_PARSE;
    case ErrorCode::ValidationError: return BK_ERR_VALIDATION;
    case ErrorCode::IoError: return BK_ERR_IO;
    case ErrorCode::InvalidArgument: return BK_ERR_INVALID_ARGUMENT;
  }
  return BK_ERR_INTERNAL;
}

bk_status fail(bk_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs body, translating exceptions into status codes.
template <class Body>
bk_status guard(Body&& body) noexcept {
  try {
    body();
    return BK_OK;
  } catch (const bklab::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(BK_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BK_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BK_ERR_INTERNAL, "unknown error");
  }
}

void require(bool condition, const char* what) {
  if (!condition) throw bklab::Error(bklab::ErrorCode::InvalidArgument, what);
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bklab::NoiseSpec to_spec(const bk_noise* noise) {
  require(noise != nullptr, "noise must not be NULL");
  bklab::NoiseSpec spec;
  switch (noise->family) {
    case BK_NOISE_NORMAL: spec.family = bklab::NoiseFamily::StandardNormal; break;
    case BK_NOISE_RADEMACHER: spec.family = bklab::NoiseFamily::Rademacher; break;
    case BK_NOISE_UNIFORM: spec.family = bklab::NoiseFamily::Uniform; break;
    case BK_NOISE_STUDENT_T: spec.family = bklab::NoiseFamily::StudentT; break;
    case BK_NOISE_PARETO: spec.family = bklab::NoiseFamily::SymmetricPareto; break;
    default: throw bklab::Error(bklab::ErrorCode::InvalidNoise, "unknown noise family");
  }
  spec.param1 = noise->param1;
  spec.param2 = noise->param2;
  spec.validate();
  return spec;
}

bk_noise from_spec(const bklab::NoiseSpec& spec) {
  bk_noise out{BK_NOISE_NORMAL, spec.param1, spec.param2};
  switch (spec.family) {
    case bklab::NoiseFamily::StandardNormal: out.family = BK_NOISE_NORMAL; break;
    case bklab::NoiseFamily::Rademacher: out.family = BK_NOISE_RADEMACHER; break;
    case bklab::NoiseFamily::Uniform: out.family = BK_NOISE_UNIFORM; break;
    case bklab::NoiseFamily::StudentT: out.family = BK_NOISE_STUDENT_T; break;
    case bklab::NoiseFamily::SymmetricPareto: out.family = BK_NOISE_PARETO; break;
  }
  return out;
}

std::span<const double> theta_span(const double* theta, size_t n) {
  require(theta != nullptr || n == 0, "theta must not be NULL");
  return {theta, n};
}

}  // namespace

extern "C" {

const char* bk_version(void) { return "1.0.0"; }

const char* bk_status_name(bk_status status) {
  switch (status) {
    case BK_OK: return "OK";
    case BK_ERR_NON_FINITE_INPUT: return "NonFiniteInput";
    case BK_ERR_HORIZON_OVERFLOW: return "HorizonOverflow";
    case BK_ERR_DEGENERATE_SPECTRUM: return "DegenerateSpectrum";
    case BK_ERR_UNSTABLE_COEFFICIENTS: return "UnstableCoefficients";
    case BK_ERR_INVALID_ORDER: return "InvalidOrder";
    case BK_ERR_INVALID_NOISE: return "InvalidNoise";
    case BK_ERR_INSUFFICIENT_HORIZON: return "InsufficientHorizon";
    case BK_ERR_INVALID_PARAMS: return "InvalidParams";
    case BK_ERR_EMPTY_GRID: return "EmptyGrid";
    case BK_ERR_INFINITE_MOMENT: return "InfiniteMoment";
    case BK_ERR_PARSE: return "ParseError";
    case BK_ERR_VALIDATION: return "ValidationError";
    case BK_ERR_IO: return "IoError";
    case BK_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case BK_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* bk_last_error(void) { return g_last_error.c_str(); }

void bk_string_free(char* s) { std::free(s); }

bk_status bk_classify_stability(double a, double b, int* stable) {
  return guard([&] {
    require(stable != nullptr, "stable must not be NULL");
    *stable = bklab::classify_stability(a, b) == bklab::Stability::Stable;
  });
}

bk_status bk_companion_spectrum(double a, double b, bk_spectrum* out) {
  return guard([&] {
    require(out != nullptr, "out must not be NULL");
    const auto s = bklab::companion_spectrum(bklab::ARCoefficients(a, b));
    *out = {s.lambda1.real(), s.lambda1.imag(), s.lambda2.real(), s.lambda2.imag(),
            s.rho, s.discriminant, s.mu};
  });
}

bk_status bk_weight_sequence(double a, double b, size_t horizon, double* u, double* cum) {
  return guard([&] {
    const auto table = bklab::weight_sequence(bklab::ARCoefficients(a, b), horizon);
    if (u) std::memcpy(u, table.u().data(), (horizon + 1) * sizeof(double));
    if (cum) std::memcpy(cum, table.cum().data(), (horizon + 1) * sizeof(double));
  });
}

bk_status bk_weight_closed_form(double a, double b, size_t s, double* out) {
  return guard([&] {
    require(out != nullptr, "out must not be NULL");
    *out = bklab::weight_closed_form(bklab::companion_spectrum(bklab::ARCoefficients(a, b)), s);
  });
}

bk_status bk_companion_power_column(double a, double b, size_t s, double* top, double* bottom) {
  return guard([&] {
    require(top != nullptr && bottom != nullptr, "outputs must not be NULL");
    const auto [t, btm] = bklab::companion_power_column(bklab::ARCoefficients(a, b), s);
    *top = t;
    *bottom = btm;
  });
}

bk_status bk_compute_bound_report(double a, double b, size_t horizon, bk_bound_report* out) {
  return guard([&] {
    require(out != nullptr, "out must not be NULL");
    const auto r = bklab::bound_report(bklab::ARCoefficients(a, b), horizon);
    *out = {r.l_star, r.cum_limit, r.koval_ratio_min, r.koval_ratio_max, r.horizon_used};
  });
}

bk_status bk_absolute_moment(const bk_noise* noise, double r, double* value, int* infinite) {
  return guard([&] {
    require(value != nullptr && infinite != nullptr, "outputs must not be NULL");
    const auto m = bklab::absolute_moment(to_spec(noise), r);
    *value = m.value;
    *infinite = m.infinite ? 1 : 0;
  });
}

bk_status bk_sample_block(const bk_noise* noise, size_t count, uint64_t seed, uint32_t purpose,
                          uint64_t n, uint64_t block, double* out) {
  return guard([&] {
    require(out != nullptr || count == 0, "out must not be NULL");
    const bklab::StreamKey key{seed, static_cast<bklab::StreamPurpose>(purpose), n, block};
    bklab::NoiseSampler sampler(to_spec(noise), key);
    sampler.fill({out, count});
  });
}

bk_status bk_simulate_path(double a, double b, const double* theta, size_t n, double* xi,
                           double* s_n) {
  return guard([&] {
    require(s_n != nullptr, "s_n must not be NULL");
    const auto path = bklab::simulate_path(bklab::ARCoefficients(a, b), theta_span(theta, n));
    if (xi) std::memcpy(xi, path.xi.data(), n * sizeof(double));
    *s_n = path.s_n;
  });
}

bk_status bk_weighted_sum(double a, double b, const double* theta, size_t n, double* out) {
  return guard([&] {
    require(out != nullptr, "out must not be NULL");
    require(n > 0, "n must be >= 1");
    const auto weights = bklab::weight_sequence(bklab::ARCoefficients(a, b), n - 1);
    *out = bklab::weighted_sum(theta_span(theta, n), weights);
  });
}

bk_status bk_representation_residual(double a, double b, const double* theta, size_t n,
                                     double* out) {
  return guard([&] {
    require(out != nullptr, "out must not be NULL");
    *out = bklab::representation_residual(bklab::ARCoefficients(a, b), theta_span(theta, n));
  });
}

bk_status bk_tail_probability(double a, double b, const bk_noise* noise, double p, double r,
                              double epsilon, uint64_t n, uint64_t replications, uint64_t seed,
                              bk_tail_estimate* out) {
  return guard([&] {
    require(out != nullptr, "out must not be NULL");
    const auto t = bklab::tail_probability(bklab::ARCoefficients(a, b), to_spec(noise),
                                           bklab::SeriesParams{p, r, epsilon}, n, replications,
                                           seed);
    *out = {t.n, t.p_hat, t.replications, t.ci_low, t.ci_high, t.at_floor ? 1 : 0};
  });
}

bk_status bk_moment_growth(double a, double b, const bk_noise* noise, double r,
                           const uint64_t* n_grid, size_t grid_len, uint64_t replications,
                           uint64_t seed, bk_slope_report* out) {
  return guard([&] {
    require(out != nullptr, "out must not be NULL");
    require(n_grid != nullptr || grid_len == 0, "n_grid must not be NULL");
    const std::vector<std::uint64_t> grid(n_grid, n_grid + grid_len);
    const auto s = bklab::moment_growth_check(bklab::ARCoefficients(a, b), to_spec(noise), r, grid,
                                              replications, seed);
    *out = {s.slope, s.intercept, s.bound};
  });
}

bk_status bk_config_parse(const char* text, bk_config** out) {
  return guard([&] {
    require(text != nullptr && out != nullptr, "arguments must not be NULL");
    *out = new bk_config{bklab::parse_config(text)};
  });
}

bk_status bk_config_load(const char* path, bk_config** out) {
  return guard([&] {
    require(path != nullptr && out != nullptr, "arguments must not be NULL");
    *out = new bk_config{bklab::load_config(path)};
  });
}

void bk_config_free(bk_config* config) { delete config; }

bk_status bk_config_get(const bk_config* config, bk_config_values* out) {
  return guard([&] {
    require(config != nullptr && out != nullptr, "arguments must not be NULL");
    const auto& c = config->value;
    *out = {c.coeffs.a(),     c.coeffs.b(),       c.params.p,     c.params.r,
            c.params.epsilon, from_spec(c.noise), c.grid_max,     c.replications,
            c.master_seed};
  });
}

const char* bk_config_output(const bk_config* config) {
  return config ? config->value.output.c_str() : nullptr;
}

bk_status bk_config_set_seed(bk_config* config, uint64_t seed) {
  return guard([&] {
    require(config != nullptr, "config must not be NULL");
    config->value.master_seed = seed;
  });
}

bk_status bk_config_set_replications(bk_config* config, uint64_t replications) {
  return guard([&] {
    require(config != nullptr, "config must not be NULL");
    auto updated = config->value;
    updated.replications = replications;
    try {
      updated.validate();
    } catch (const bklab::Error& e) {
      throw bklab::Error(bklab::ErrorCode::ValidationError, e.what());
    }
    config->value = updated;
  });
}

bk_status bk_config_set_output(bk_config* config, const char* output) {
  return guard([&] {
    require(config != nullptr && output != nullptr, "arguments must not be NULL");
    require(*output != '\0', "output must not be empty");
    config->value.output = output;
  });
}

bk_status bk_config_render(const bk_config* config, char** text) {
  return guard([&] {
    require(config != nullptr && text != nullptr, "arguments must not be NULL");
    *text = duplicate(bklab::render_config(config->value));
  });
}

bk_status bk_series_run(const bk_config* config, bk_series** out) {
  return guard([&] {
    require(config != nullptr && out != nullptr, "arguments must not be NULL");
    const auto& c = config->value;
    c.validate();
    *out = new bk_series{bklab::partial_series(c.coeffs, c.noise, c.params,
                                               bklab::default_grid(c.grid_max), c.replications,
                                               c.master_seed)};
  });
}

void bk_series_free(bk_series* series) { delete series; }

size_t bk_series_size(const bk_series* series) { return series ? series->value.grid.size() : 0; }

bk_status bk_series_row_at(const bk_series* series, size_t index, bk_series_row* out) {
  return guard([&] {
    require(series != nullptr && out != nullptr, "arguments must not be NULL");
    const auto& s = series->value;
    require(index < s.grid.size(), "row index out of range");
    const auto& t = s.tails[index];
    *out = {s.grid[index], t.p_hat, t.ci_low, t.ci_high, s.terms[index],
            s.partial_sums[index], s.partial_sum_ci_high[index], t.at_floor ? 1 : 0};
  });
}

bk_verdict bk_series_verdict(const bk_series* series) {
  return static_cast<bk_verdict>(bklab::verdict_exit_code(series->value.verdict));
}

bk_status bk_series_csv(const bk_series* series, char** text) {
  return guard([&] {
    require(series != nullptr && text != nullptr, "arguments must not be NULL");
    *text = duplicate(bklab::emit_series_csv(series->value));
  });
}

bk_status bk_run(const bk_config* config, bk_verdict* verdict, char** summary) {
  return guard([&] {
    require(config != nullptr && verdict != nullptr, "arguments must not be NULL");
    const auto outcome = bklab::run_experiment(config->value);
    *verdict = static_cast<bk_verdict>(bklab::verdict_exit_code(outcome.verdict));
    if (summary) *summary = duplicate(outcome.summary);
  });
}

bk_status bk_spectrum_report(const bk_config* config, char** text, char** csv) {
  return guard([&] {
    require(config != nullptr, "config must not be NULL");
    const auto& coeffs = config->value.coeffs;
    const auto spectrum = bklab::companion_spectrum(coeffs);
    const auto bound = bklab::bound_report(coeffs, bklab::kReportHorizon);
    std::string t = bklab::describe_spectrum(coeffs, spectrum, bound);
    std::string c = bklab::emit_spectrum_csv(coeffs, spectrum, bound);
    char* t_out = text ? duplicate(t) : nullptr;
    try {
      if (csv) *csv = duplicate(c);
    } catch (...) {
      std::free(t_out);
      throw;
    }
    if (text) *text = t_out;
  });
}

bk_status bk_weights_csv(const bk_config* config, size_t horizon, char** csv) {
  return guard([&] {
    require(config != nullptr && csv != nullptr, "arguments must not be NULL");
    *csv = duplicate(bklab::emit_weights_csv(bklab::weight_sequence(config->value.coeffs, horizon)));
  });
}

bk_status bk_paths_csv(const bk_config* config, uint64_t paths, char** csv) {
  return guard([&] {
    require(config != nullptr && csv != nullptr, "arguments must not be NULL");
    *csv = duplicate(bklab::emit_paths_csv(config->value, paths));
  });
}

bk_status bk_verify(const bk_config* config, int* failures, char** report) {
  return guard([&] {
    require(config != nullptr && failures != nullptr, "arguments must not be NULL");
    const auto results = bklab::verify_invariants(config->value);
    std::string text;
    int failed = 0;
    for (const auto& r : results) {
      if (!r.passed) ++failed;
      text += (r.passed ? "PASS  " : "FAIL  ") + r.name + ": " + r.detail + '\n';
    }
    *failures = failed;
    if (report) *report = duplicate(text);
  });
}

}  // extern "C"
