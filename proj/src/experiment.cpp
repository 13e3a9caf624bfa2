#include "bklab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bklab/error.hpp"
#include "bklab/simulate.hpp"

namespace bklab {

namespace {

const std::set<std::string, std::less<>> kKnownKeys = {
    "a",          "b",           "p",        "r",            "epsilon", "noise.family",
    "noise.param1", "noise.param2", "grid_max", "replications", "seed",    "output"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

double to_real(const std::string& key, const Entry& e) {
  double v = 0.0;
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    parse_fail(e.line, "key '" + key + "': '" + e.value + "' is not a finite number");
  }
  return v;
}

std::uint64_t to_unsigned(const std::string& key, const Entry& e) {
  std::uint64_t v = 0;
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    parse_fail(e.line, "key '" + key + "': '" + e.value + "' is not an unsigned integer");
  }
  return v;
}

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::ValidationError, what);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path + "'");
}

}  // namespace

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void ExperimentConfig::validate() const {
  const double a = coeffs.a();
  const double b = coeffs.b();
  if (!(b > -1.0 + kStabilitySlack)) {
    invalid("stability condition -1 < b < 1 - |a| violated: b = " + format_real(b) +
            " is not > -1");
  }
  if (!(b < 1.0 - std::abs(a) - kStabilitySlack)) {
    invalid("stability condition -1 < b < 1 - |a| violated: b = " + format_real(b) +
            " >= 1 - |a| = " + format_real(1.0 - std::abs(a)));
  }
  if (!(params.p > 0.0 && params.p < 2.0)) {
    invalid("p = " + format_real(params.p) + " violates 0 < p < 2");
  }
  if (!(params.r >= params.p)) {
    invalid("r = " + format_real(params.r) + " < p = " + format_real(params.p) +
            " violates the hypothesis r >= p");
  }
  if (!(params.epsilon > 0.0)) {
    invalid("epsilon = " + format_real(params.epsilon) + " violates epsilon > 0");
  }
  try {
    noise.validate();
  } catch (const Error& e) {
    invalid(e.what());
  }
  if (grid_max < 1) invalid("grid_max must be >= 1");
  if (replications < 100) invalid("replications must be >= 100");
  if (output.empty()) invalid("output must not be empty");
}

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, Entry, std::less<>> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_fail(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) parse_fail(line_no, "missing key before '='");
    if (!kKnownKeys.contains(key)) parse_fail(line_no, "unknown key '" + key + "'");
    if (value.empty()) parse_fail(line_no, "key '" + key + "' has no value");
    if (entries.contains(key)) parse_fail(line_no, "duplicate key '" + key + "'");
    entries.emplace(key, Entry{value, line_no});
  }

  for (const char* required : {"a", "b", "p", "r", "epsilon", "noise.family"}) {
    if (!entries.contains(required)) invalid(std::string("missing required key '") + required + "'");
  }
  auto real = [&](const std::string& key) { return to_real(key, entries.at(key)); };

  ExperimentConfig cfg;
  const double a = real("a");
  const double b = real("b");
  try {
    cfg.coeffs = ARCoefficients(a, b);
  } catch (const Error& e) {
    invalid(e.what());
  }
  cfg.params = SeriesParams{real("p"), real("r"), real("epsilon")};

  const Entry& family = entries.at("noise.family");
  try {
    cfg.noise.family = parse_family(family.value);
  } catch (const Error& e) {
    parse_fail(family.line, e.what());
  }
  switch (cfg.noise.family) {
    case NoiseFamily::Uniform: cfg.noise.param1 = 1.0; break;
    case NoiseFamily::SymmetricPareto: cfg.noise.param2 = 1.0; break;
    default: break;
  }
  const bool needs_param1 =
      cfg.noise.family == NoiseFamily::StudentT || cfg.noise.family == NoiseFamily::SymmetricPareto;
  if (entries.contains("noise.param1")) {
    cfg.noise.param1 = real("noise.param1");
  } else if (needs_param1) {
    invalid("noise family '" + family.value + "' requires noise.param1");
  }
  if (entries.contains("noise.param2")) cfg.noise.param2 = real("noise.param2");

  if (entries.contains("grid_max")) cfg.grid_max = to_unsigned("grid_max", entries.at("grid_max"));
  if (entries.contains("replications"))
    cfg.replications = to_unsigned("replications", entries.at("replications"));
  if (entries.contains("seed")) cfg.master_seed = to_unsigned("seed", entries.at("seed"));
  if (entries.contains("output")) cfg.output = entries.at("output").value;

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string render_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "a = " << format_real(c.coeffs.a()) << '\n'
     << "b = " << format_real(c.coeffs.b()) << '\n'
     << "p = " << format_real(c.params.p) << '\n'
     << "r = " << format_real(c.params.r) << '\n'
     << "epsilon = " << format_real(c.params.epsilon) << '\n'
     << "noise.family = " << family_name(c.noise.family) << '\n'
     << "noise.param1 = " << format_real(c.noise.param1) << '\n'
     << "noise.param2 = " << format_real(c.noise.param2) << '\n'
     << "grid_max = " << c.grid_max << '\n'
     << "replications = " << c.replications << '\n'
     << "seed = " << c.master_seed << '\n'
     << "output = " << c.output << '\n';
  return os.str();
}

std::string emit_series_csv(const SeriesEstimate& est) {
  if (est.grid.empty() || est.tails.size() != est.grid.size() ||
      est.terms.size() != est.grid.size()) {
    throw Error(ErrorCode::InvalidArgument, "series estimate is empty or incomplete");
  }
  std::string out = "n,p_hat,ci_low,ci_high,term,partial_sum,partial_sum_ci_high,at_floor\n";
  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    const TailEstimate& t = est.tails[i];
    out += std::to_string(est.grid[i]);
    for (double v : {t.p_hat, t.ci_low, t.ci_high, est.terms[i], est.partial_sums[i],
                     est.partial_sum_ci_high[i]}) {
      out += ',';
      out += format_real(v);
    }
    out += t.at_floor ? ",true\n" : ",false\n";
  }
  return out;
}

std::string emit_spectrum_csv(const ARCoefficients& coeffs, const CompanionSpectrum& s,
                              const BoundReport& bound) {
  std::string out =
      "a,b,stable,lambda1_re,lambda1_im,lambda2_re,lambda2_im,rho,mu,discriminant,"
      "l_star,cum_limit,koval_ratio_min,koval_ratio_max,horizon_used\n";
  out += format_real(coeffs.a()) + ',' + format_real(coeffs.b()) + ',' +
         (coeffs.stable() ? "true" : "false");
  for (double v : {s.lambda1.real(), s.lambda1.imag(), s.lambda2.real(), s.lambda2.imag(), s.rho}) {
    out += ',' + format_real(v);
  }
  out += ',' + std::to_string(s.mu);
  for (double v : {s.discriminant, bound.l_star, bound.cum_limit, bound.koval_ratio_min,
                   bound.koval_ratio_max}) {
    out += ',' + format_real(v);
  }
  out += ',' + std::to_string(bound.horizon_used) + '\n';
  return out;
}

std::string emit_weights_csv(const WeightTable& table) {
  std::string out = "n,u,cum\n";
  for (std::size_t n = 0; n <= table.horizon(); ++n) {
    out += std::to_string(n) + ',' + format_real(table.u(n)) + ',' + format_real(table.cum(n)) + '\n';
  }
  return out;
}

std::string describe_spectrum(const ARCoefficients& coeffs, const CompanionSpectrum& s,
                              const BoundReport& bound) {
  std::ostringstream os;
  auto complex_text = [](std::complex<double> z) {
    std::string t = format_real(z.real());
    if (z.imag() != 0.0) t += (z.imag() > 0 ? " + " : " - ") + format_real(std::abs(z.imag())) + "i";
    return t;
  };
  os << "coefficients      a = " << format_real(coeffs.a()) << ", b = " << format_real(coeffs.b())
     << " (" << (coeffs.stable() ? "stable" : "unstable") << ")\n"
     << "discriminant      " << format_real(s.discriminant) << '\n'
     << "lambda1           " << complex_text(s.lambda1) << '\n'
     << "lambda2           " << complex_text(s.lambda2) << '\n'
     << "spectral radius   " << format_real(s.rho) << '\n'
     << "multiplicity mu   " << s.mu << '\n'
     << "sup_j |U(j)|      " << format_real(bound.l_star) << '\n'
     << "1/(1-a-b)         " << format_real(bound.cum_limit) << '\n'
     << "envelope ratio    [" << format_real(bound.koval_ratio_min) << ", "
     << format_real(bound.koval_ratio_max) << "] over s <= " << bound.horizon_used << '\n';
  return os.str();
}

std::string emit_paths_csv(const ExperimentConfig& config, std::uint64_t paths) {
  std::string out = "path,k,theta,xi,partial_sum\n";
  for (std::uint64_t path = 0; path < paths; ++path) {
    const auto theta = sample_block(
        config.noise, config.grid_max,
        StreamKey{config.master_seed, StreamPurpose::SamplePath, config.grid_max, path});
    const Path p = simulate_path(config.coeffs, theta);
    double running = 0.0;
    for (std::size_t k = 0; k < p.n(); ++k) {
      running += p.xi[k];
      out += std::to_string(path) + ',' + std::to_string(k + 1) + ',' + format_real(p.theta[k]) +
             ',' + format_real(p.xi[k]) + ',' + format_real(running) + '\n';
    }
  }
  return out;
}

int verdict_exit_code(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::Stabilized: return 0;
    case Verdict::FloorLimited: return 2;
    case Verdict::Growing: return 3;
  }
  return 1;
}

RunOutcome run_experiment(const ExperimentConfig& config, const EstimatorOptions& options) {
  config.validate();
  const ARCoefficients& coeffs = config.coeffs;
  if (classify_stability(coeffs) != Stability::Stable) {
    throw Error(ErrorCode::UnstableCoefficients, "stability condition -1 < b < 1 - |a| violated");
  }
  const CompanionSpectrum spectrum = companion_spectrum(coeffs);
  const BoundReport bound = bound_report(coeffs, kReportHorizon);

  double max_residual = 0.0;
  for (std::uint64_t probe = 0; probe < kProbePaths; ++probe) {
    const auto theta = sample_block(
        config.noise, kProbeLength,
        StreamKey{config.master_seed, StreamPurpose::ProbePath, kProbeLength, probe});
    max_residual = std::max(max_residual, representation_residual(coeffs, theta));
  }

  RunOutcome outcome;
  outcome.series = partial_series(coeffs, config.noise, config.params,
                                  default_grid(config.grid_max), config.replications,
                                  config.master_seed, options);
  outcome.verdict = outcome.series.verdict;

  const MomentValue moment = absolute_moment(config.noise, config.params.r);
  std::ostringstream os;
  os << "# AR(2) Baum-Katz series run\n\n" << render_config(config) << '\n'
     << describe_spectrum(coeffs, spectrum, bound) << '\n'
     << "representation self-check: max residual " << format_real(max_residual) << " over "
     << kProbePaths << " paths of length " << kProbeLength
     << (max_residual <= 1e-9 ? " (ok)\n" : " (EXCEEDS 1e-9)\n");
  os << "E|theta|^r         "
     << (moment.finite() ? format_real(moment.value) : std::string("infinite")) << '\n';
  if (moment.infinite) {
    os << "note: E|theta|^r is infinite, so the sufficient moment condition fails;"
          " this run is exploratory\n";
  }

  const SeriesEstimate& est = outcome.series;
  const SeriesDiagnostics& d = est.diagnostics;
  os << "\nseries exponent r/p-2 = " << format_real(config.params.exponent()) << ", grid 1.."
     << est.grid.back() << " (" << est.grid.size() << " points), " << config.replications
     << " replications per point\n"
     << "partial sum                " << format_real(est.partial_sums.back()) << '\n'
     << "CI-upper partial sum       " << format_real(d.ci_total) << '\n'
     << "last dyadic block mass     " << format_real(d.last_block_mass) << " (CI-upper "
     << format_real(d.last_block_ci_mass) << ")\n"
     << "block means last/previous  " << format_real(d.last_block_mean) << " / "
     << format_real(d.previous_block_mean) << '\n'
     << "at-floor terms before stabilization " << d.floor_terms_before_stabilization << '\n'
     << "verdict                    " << verdict_name(est.verdict) << '\n';

  if (moment.finite()) {
    const std::vector<std::uint64_t> n_grid{64, 128, 256, 512, 1024};
    const std::uint64_t reps = std::min<std::uint64_t>(config.replications, 20000);
    const SlopeReport slope = moment_growth_check(coeffs, config.noise, config.params.r, n_grid,
                                                  reps, config.master_seed, options);
    os << "\nmoment growth E|S_n|^r over n in {64..1024}, " << reps << " replications\n"
       << "fitted slope               " << format_real(slope.slope) << '\n'
       << "bound max(1, r/2)          " << format_real(slope.bound) << '\n';
  }
  outcome.summary = os.str();

  const std::string series_path = config.output + ".series.csv";
  const std::string spectrum_path = config.output + ".spectrum.csv";
  const std::string summary_path = config.output + ".summary.txt";
  write_file(series_path, emit_series_csv(est));
  write_file(spectrum_path, emit_spectrum_csv(coeffs, spectrum, bound));
  write_file(summary_path, outcome.summary);
  outcome.written = {series_path, spectrum_path, summary_path};
  return outcome;
}

}  // namespace bklab
