// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bklab/error.hpp"
#include "bklab/estimate.hpp"
#include "bklab/experiment.hpp"
#include "bklab/noise.hpp"
#include "bklab/recurrence.hpp"
#include "bklab/simulate.hpp"
#include "oracles.hpp"

using namespace bklab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

const std::vector<std::pair<double, double>> kNamedSet = {
    {0.3, 0.2}, {1.0, -0.25}, {0.0, -0.5}, {-0.6, 0.3}};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_err(double x, double ref) {
  if (x == ref) return 0.0;
  return std::abs(x - ref) / std::abs(ref);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path workdir() {
  const fs::path dir = fs::temp_directory_path() / "bklab_acceptance";
  fs::create_directories(dir);
  return dir;
}

// Runs the CLI, capturing stderr; returns the exit status.
int run_cli(const std::string& args, std::string* err = nullptr) {
  const fs::path err_file = workdir() / "stderr.txt";
  const std::string cmd = std::string("\"") + BKLAB_CLI + "\" " + args + " >/dev/null 2>\"" +
                          err_file.string() + "\"";
  const int status = std::system(cmd.c_str());
  if (err) *err = read_file(err_file);
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

Outcome dual_representation() {
  double worst = 0.0;
  std::uint64_t vectors = 0;
  for (auto [a, b] : kNamedSet) {
    const ARCoefficients c(a, b);
    const WeightTable table = weight_sequence(c, 999);
    for (std::uint64_t v = 0; v < 100; ++v) {
      const auto theta = sample_block(NoiseSpec::standard_normal(), 1000,
                                      {2024, StreamPurpose::Test, 1000, v});
      ++vectors;
      for (std::size_t n = 1; n <= 1000; ++n) {
        const std::span<const double> prefix(theta.data(), n);
        const double direct = simulate_path(c, prefix).s_n;
        const double weighted = weighted_sum(prefix, table);
        worst = std::max(worst, std::abs(direct - weighted) / std::max(1.0, std::abs(direct)));
      }
    }
    worst = std::max(worst, representation_residual(c, sample_block(NoiseSpec::standard_normal(), 1000,
                                                                      {2025, StreamPurpose::Test, 0, 0})));
  }
  return {worst <= 1e-9, fmt("max residual %.3g over %llu vectors x n=1..1000 (<= 1e-9)", worst,
                             static_cast<unsigned long long>(vectors))};
}

Outcome matrix_power() {
  double worst = 0.0;
  bool displayed = true;
  for (auto [a, b] : kNamedSet) {
    const ARCoefficients c(a, b);
    const WeightTable t = weight_sequence(c, 100);
    for (std::size_t s = 1; s <= 100; ++s) {
      const auto col = companion_power_column(c, s);
      worst = std::max({worst, rel_err(col.first, t.u(s)), rel_err(col.second, t.u(s - 1))});
    }
    const auto c1 = companion_power_column(c, 1);
    const auto c2 = companion_power_column(c, 2);
    const auto c3 = companion_power_column(c, 3);
    displayed = displayed && rel_err(c1.first, a) <= 1e-12 && c1.second == 1.0 &&
                rel_err(c2.first, a * a + b) <= 1e-12 && rel_err(c2.second, a) <= 1e-12 &&
                rel_err(c3.first, a * a * a + 2 * a * b) <= 1e-12 &&
                rel_err(c3.second, a * a + b) <= 1e-12;
  }
  return {worst <= 1e-12 && displayed,
          fmt("max relative error %.3g for s <= 100 (<= 1e-12); s = 1, 2, 3 displayed forms %s",
              worst, displayed ? "match" : "DIFFER")};
}

Outcome closed_form() {
  std::mt19937_64 rng(31337);
  double worst = 0.0, worst_power = 0.0;
  int pairs = 0;
  while (pairs < 1000) {
    const auto [a, b] = oracle::random_stable(rng);
    if (std::abs(a * a + 4 * b) <= 1e-6) continue;
    ++pairs;
    const ARCoefficients c(a, b);
    const auto spectrum = companion_spectrum(c);
    const WeightTable t = weight_sequence(c, 200);
    for (std::size_t s = 0; s <= 200; ++s) {
      const double u = t.u(s);
      if (u == 0.0 || std::abs(u) < std::numeric_limits<double>::min()) continue;
      worst = std::max(worst, rel_err(weight_closed_form(spectrum, s), u));
      if (s >= 1) worst_power = std::max(worst_power, rel_err(companion_power_column(c, s).first, u));
    }
  }
  return {worst <= 1e-8 && worst_power <= 1e-8,
          fmt("%d pairs, s <= 200: closed form %.3g, matrix power %.3g (<= 1e-8)", pairs, worst,
              worst_power)};
}

Outcome stability_grid() {
  long checked = 0, excluded = 0, disagree = 0;
  for (int i = -200; i <= 200; ++i) {
    for (int j = -150; j <= 150; ++j) {
      const double a = i / 100.0, b = j / 100.0;
      if (oracle::triangle_boundary_distance(a, b) <= 1e-6) {
        ++excluded;
        continue;
      }
      ++checked;
      const bool stable = classify_stability(a, b) == Stability::Stable;
      const bool inside = companion_spectrum(ARCoefficients(a, b)).rho < 1.0;
      if (stable != inside) ++disagree;
    }
  }
  return {disagree == 0, fmt("%ld points, %ld disagreements, %ld boundary points excluded", checked,
                             disagree, excluded)};
}

Outcome cumulative_limit() {
  const ARCoefficients c(0.3, 0.2);
  const double u200 = weight_sequence(c, 200).cum(200);
  const double limit = bound_report(c, 200).cum_limit;
  const double gap = std::abs(u200 - 1.0 / (1.0 - 0.3 - 0.2));
  return {gap <= 1e-6 && std::abs(limit - 2.0) <= 1e-12, fmt("U(200) = %.17g, limit %.17g, gap %.3g (<= 1e-6)", u200, limit, gap)};
}

Outcome koval_envelope() {
  bool ok = true;
  std::string detail;
  for (auto [a, b] : kNamedSet) {
    const ARCoefficients c(a, b);
    const auto full = bound_report(c, 1000);
    const auto head = bound_report(c, 50);
    const bool pass = full.koval_ratio_max <= 1.05 * head.koval_ratio_max && full.koval_ratio_min > 0.0;
    ok = ok && pass;
    detail += fmt("(%g,%g): [%.6g, %.6g] vs 1.05*%.6g; ", a, b, full.koval_ratio_min,
                  full.koval_ratio_max, head.koval_ratio_max);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome exact_tails() {
  const ARCoefficients iid(0.0, 0.0);
  const auto one = tail_probability(iid, NoiseSpec::rademacher(), {1.0, 2.0, 0.5}, 1, 100000, 1);
  const auto zero = tail_probability(iid, NoiseSpec::rademacher(), {1.0, 2.0, 2.0}, 1, 100000, 1);
  const bool exact = one.p_hat == 1.0 && zero.p_hat == 0.0 && zero.at_floor;
  const double truth = 2.0 * oracle::normal_cdf(-2.0);
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto est = tail_probability(iid, NoiseSpec::standard_normal(), {1.0, 2.0, 1.0}, 4, 100000, seed);
    if (est.ci_low <= truth && truth <= est.ci_high) ++covered;
  }
  return {exact && covered >= 93,
          fmt("Rademacher n=1 p_hat {%g, %g}; Gaussian n=4 covers 2Phi(-2)=%.5f in %d/100 (>= 93)",
              one.p_hat, zero.p_hat, truth, covered)};
}

Outcome desk_run() {
  const SeriesParams params{1.0, 2.0, 1.0};
  const auto est = partial_series(ARCoefficients(0.3, 0.2), NoiseSpec::standard_normal(), params,
                                  default_grid(128), 100000, 1);
  const auto& d = est.diagnostics;
  const double share = d.last_block_mass / d.ci_total;
  const double ci_share = d.last_block_ci_mass / d.ci_total;

  std::size_t violations = 0;
  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    if (est.grid[i] < 16) continue;
    for (std::size_t j = i + 1; j < est.grid.size(); ++j) {
      if (est.terms[j] > est.terms[i] && est.tails[j].ci_low > est.tails[i].ci_high) ++violations;
    }
  }
  const bool ok = est.verdict == Verdict::Stabilized && share <= 1e-3 && violations == 0;
  return {ok, fmt("verdict %s; last block mass %.3g of CI-upper sum %.6g (<= 1e-3; its CI-upper share "
                  "is %.3g); %zu monotonicity breaks beyond CI overlap for n >= 16",
                  std::string(verdict_name(est.verdict)).c_str(), share, d.ci_total, ci_share, violations)};
}

Outcome moment_growth() {
  const ARCoefficients c(0.3, 0.2);
  const std::vector<std::uint64_t> grid = {64, 128, 256, 512, 1024};
  const auto g2 = moment_growth_check(c, NoiseSpec::standard_normal(), 2.0, grid, 100000, 1);
  const auto g4 = moment_growth_check(c, NoiseSpec::standard_normal(), 4.0, grid, 100000, 1);
  const auto r1 = moment_growth_check(c, NoiseSpec::rademacher(), 1.0, grid, 100000, 1);
  bool ok = g2.slope >= 0.9 && g2.slope <= 1.1 && g4.slope >= 1.8 && g4.slope <= 2.2 && r1.slope <= 0.65;
  for (const auto* s : {&g2, &g4, &r1}) ok = ok && s->slope <= s->bound + 0.15;
  return {ok, fmt("Gaussian r=2 %.4f in [0.9,1.1]; Gaussian r=4 %.4f in [1.8,2.2]; Rademacher r=1 %.4f <= 0.65",
                  g2.slope, g4.slope, r1.slope)};
}

Outcome determinism() {
  const fs::path dir = workdir();
  const std::string cfg = std::string(BKLAB_SOURCE_DIR) + "/configs/gaussian_2markov.cfg";
  const std::string first = (dir / "first").string(), second = (dir / "second").string();
  for (const auto& p : {first, second}) {
    fs::remove(p + ".series.csv");
    fs::remove(p + ".spectrum.csv");
  }
  const int s1 = run_cli("series --config \"" + cfg + "\" --out \"" + first + "\"");
  const int s2 = run_cli("series --config \"" + cfg + "\" --out \"" + second + "\"");
  const std::string a = read_file(first + ".series.csv"), b = read_file(second + ".series.csv");
  const std::string c = read_file(first + ".spectrum.csv"), d = read_file(second + ".spectrum.csv");
  const bool ok = s1 == 0 && s2 == 0 && !a.empty() && a == b && !c.empty() && c == d;
  return {ok, fmt("exit codes %d/%d; series.csv %s (%zu bytes); spectrum.csv %s", s1, s2,
                  a == b ? "identical" : "DIFFER", a.size(), c == d ? "identical" : "DIFFER")};
}

Outcome hypothesis_enforcement() {
  struct Case {
    const char* name;
    const char* body;
    const char* must_mention;
  };
  const Case cases[] = {
      {"p", "a=0.3\nb=0.2\np=2.5\nr=3\nepsilon=1\nnoise.family=normal\n", "0 < p < 2"},
      {"p0", "a=0.3\nb=0.2\np=0\nr=3\nepsilon=1\nnoise.family=normal\n", "0 < p < 2"},
      {"r", "a=0.3\nb=0.2\np=1.5\nr=1\nepsilon=1\nnoise.family=normal\n", "r >= p"},
      {"ab", "a=0.5\nb=0.8\np=1\nr=2\nepsilon=1\nnoise.family=normal\n", "-1 < b < 1 - |a|"},
      {"b", "a=0\nb=-1.2\np=1\nr=2\nepsilon=1\nnoise.family=normal\n", "-1 < b < 1 - |a|"},
      {"edge", "a=0.5\nb=0.5\np=1\nr=2\nepsilon=1\nnoise.family=normal\n", "-1 < b < 1 - |a|"},
  };
  const fs::path dir = workdir();
  int rejected = 0;
  std::string failures;
  for (const auto& c : cases) {
    const fs::path cfg = dir / (std::string("bad_") + c.name + ".cfg");
    const fs::path out = dir / (std::string("bad_") + c.name);
    std::ofstream(cfg) << c.body;
    fs::remove(out.string() + ".series.csv");
    std::string err;
    const int status = run_cli("series --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"", &err);
    const bool single_line = std::count(err.begin(), err.end(), '\n') == 1;
    if (status == 1 && single_line && err.find(c.must_mention) != std::string::npos &&
        !fs::exists(out.string() + ".series.csv")) {
      ++rejected;
    } else {
      failures += fmt(" [%s: exit %d, '%s']", c.name, status, err.c_str());
    }
  }
  // The estimator layer refuses unstable coefficients on its own as well.
  int guarded = 0;
  const ARCoefficients unstable(0.5, 0.5);
  const SeriesParams params{1.0, 2.0, 1.0};
  for (const auto& call : std::vector<std::function<void()>>{
           [&] { tail_probability(unstable, NoiseSpec::standard_normal(), params, 4, 1000, 1); },
           [&] { partial_series(unstable, NoiseSpec::standard_normal(), params, {1, 2}, 1000, 1); },
           [&] { moment_growth_check(unstable, NoiseSpec::standard_normal(), 2.0, {8, 16, 32, 64}, 1000, 1); },
           [&] { bound_report(unstable, 100); }}) {
    try {
      call();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::UnstableCoefficients) ++guarded;
    }
  }
  const int total = static_cast<int>(std::size(cases));
  return {rejected == total && guarded == 4,
          fmt("%d/%d bad configs rejected by the CLI with the condition named; %d/4 estimator entry "
              "points refuse unstable coefficients%s",
              rejected, total, guarded, failures.c_str())};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "dual representation", 5, dual_representation},
      {2, "matrix power identity", 1, matrix_power},
      {3, "closed form vs recurrence", 5, closed_form},
      {4, "stability region vs spectral radius", 10, stability_grid},
      {5, "cumulative weight limit", 1, cumulative_limit},
      {6, "envelope ratio bounds", 1, koval_envelope},
      {7, "exact tail checkpoints", 60, exact_tails},
      {8, "desk run at the Hsu-Robbins exponent", 600, desk_run},
      {9, "moment growth exponents", 300, moment_growth},
      {10, "determinism of the series pipeline", 600, determinism},
      {11, "hypothesis enforcement", 60, hypothesis_enforcement},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = out.passed && in_time;
    if (!pass) ++failed;
    std::printf("%s  %2d  %s: %s; %.2f s (< %g s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), secs, c.budget_s, in_time ? "" : " OVER BUDGET");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
