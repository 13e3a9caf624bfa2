#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "bklab/bklab.h"

namespace {

const char* kConfig =
    "a = 0.3\nb = 0.2\np = 1\nr = 2\nepsilon = 1\nnoise.family = normal\n"
    "grid_max = 16\nreplications = 2000\nseed = 3\n";

struct Owned {
  char* p = nullptr;
  ~Owned() { bk_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(bk_version()) == "1.0.0");
  CHECK(std::string(bk_status_name(BK_OK)) == "OK");
  CHECK(std::string(bk_status_name(BK_ERR_UNSTABLE_COEFFICIENTS)) == "UnstableCoefficients");
  CHECK(std::string(bk_status_name(static_cast<bk_status>(999))) == "Unknown");
}

TEST_CASE("errors map to status codes with a message") {
  double out = 0.0;
  CHECK(bk_weight_closed_form(NAN, 0.0, 2, &out) == BK_ERR_NON_FINITE_INPUT);
  CHECK(std::string(bk_last_error()).size() > 0);
  bk_bound_report rep{};
  CHECK(bk_compute_bound_report(1.5, 0.0, 100, &rep) == BK_ERR_UNSTABLE_COEFFICIENTS);
  CHECK(bk_compute_bound_report(0.3, 0.2, 100, nullptr) == BK_ERR_INVALID_ARGUMENT);
  std::vector<double> u(1001);
  CHECK(bk_weight_sequence(3.0, 0.0, 1000, u.data(), nullptr) == BK_ERR_HORIZON_OVERFLOW);
  bk_noise bad{BK_NOISE_STUDENT_T, -1.0, 0.0};
  CHECK(bk_sample_block(&bad, 4, 1, 99, 0, 0, u.data()) == BK_ERR_INVALID_NOISE);
  double m = 0.0;
  int inf = 0;
  bk_noise gauss{BK_NOISE_NORMAL, 0.0, 0.0};
  CHECK(bk_absolute_moment(&gauss, -1.0, &m, &inf) == BK_ERR_INVALID_ORDER);
}

TEST_CASE("deterministic core through the C surface") {
  bk_spectrum s{};
  REQUIRE(bk_companion_spectrum(0.0, -0.5, &s) == BK_OK);
  CHECK(s.rho == doctest::Approx(std::sqrt(0.5)));
  CHECK(s.lambda1_re == 0.0);

  std::vector<double> u(4), cum(4);
  REQUIRE(bk_weight_sequence(0.3, 0.2, 3, u.data(), cum.data()) == BK_OK);
  CHECK(u[3] == doctest::Approx(0.147));
  CHECK(cum[3] == doctest::Approx(1.737));

  double top = 0.0, bottom = 0.0;
  REQUIRE(bk_companion_power_column(0.3, 0.2, 2, &top, &bottom) == BK_OK);
  CHECK(top == doctest::Approx(0.29));
  CHECK(bottom == doctest::Approx(0.3));

  double cf = 0.0;
  REQUIRE(bk_weight_closed_form(1.0, -0.25, 3, &cf) == BK_OK);
  CHECK(cf == 0.5);

  bk_bound_report rep{};
  REQUIRE(bk_compute_bound_report(0.3, 0.2, 200, &rep) == BK_OK);
  CHECK(rep.cum_limit == doctest::Approx(2.0));
  CHECK(rep.horizon_used == 200);
}

TEST_CASE("paths and sampling") {
  bk_noise gauss{BK_NOISE_NORMAL, 0.0, 0.0};
  std::vector<double> theta(500), again(500);
  REQUIRE(bk_sample_block(&gauss, theta.size(), 11, 99, 0, 0, theta.data()) == BK_OK);
  REQUIRE(bk_sample_block(&gauss, again.size(), 11, 99, 0, 0, again.data()) == BK_OK);
  CHECK(theta == again);

  double s_n = 0.0, ws = 0.0, res = 1.0;
  std::vector<double> xi(theta.size());
  REQUIRE(bk_simulate_path(0.3, 0.2, theta.data(), theta.size(), xi.data(), &s_n) == BK_OK);
  REQUIRE(bk_weighted_sum(0.3, 0.2, theta.data(), theta.size(), &ws) == BK_OK);
  REQUIRE(bk_representation_residual(0.3, 0.2, theta.data(), theta.size(), &res) == BK_OK);
  CHECK(std::abs(s_n - ws) <= 1e-9 * std::max(1.0, std::abs(s_n)));
  CHECK(res <= 1e-9);
  CHECK(bk_simulate_path(0.3, 0.2, theta.data(), 0, nullptr, &s_n) == BK_ERR_NON_FINITE_INPUT);
}

TEST_CASE("Monte Carlo entry points") {
  bk_noise rad{BK_NOISE_RADEMACHER, 0.0, 0.0};
  bk_tail_estimate t{};
  REQUIRE(bk_tail_probability(0.0, 0.0, &rad, 1.0, 2.0, 0.5, 1, 1000, 1, &t) == BK_OK);
  CHECK(t.p_hat == 1.0);
  REQUIRE(bk_tail_probability(0.0, 0.0, &rad, 1.0, 2.0, 2.0, 1, 1000, 1, &t) == BK_OK);
  CHECK(t.at_floor == 1);
  CHECK(bk_tail_probability(0.0, 0.0, &rad, 2.5, 3.0, 1.0, 1, 1000, 1, &t) == BK_ERR_INVALID_PARAMS);

  bk_noise pareto{BK_NOISE_PARETO, 1.5, 1.0};
  const uint64_t grid[] = {8, 16, 32, 64};
  bk_slope_report slope{};
  CHECK(bk_moment_growth(0.3, 0.2, &pareto, 2.0, grid, 4, 1000, 1, &slope) == BK_ERR_INFINITE_MOMENT);
  bk_noise gauss{BK_NOISE_NORMAL, 0.0, 0.0};
  REQUIRE(bk_moment_growth(0.3, 0.2, &gauss, 2.0, grid, 4, 4000, 1, &slope) == BK_OK);
  CHECK(slope.bound == 1.0);
  CHECK(slope.slope > 0.5);
}

TEST_CASE("config handle lifecycle") {
  bk_config* cfg = nullptr;
  REQUIRE(bk_config_parse(kConfig, &cfg) == BK_OK);
  bk_config_values v{};
  REQUIRE(bk_config_get(cfg, &v) == BK_OK);
  CHECK(v.a == 0.3);
  CHECK(v.grid_max == 16);
  CHECK(v.noise.family == BK_NOISE_NORMAL);
  CHECK(bk_config_set_seed(cfg, 42) == BK_OK);
  CHECK(bk_config_set_replications(cfg, 10) == BK_ERR_VALIDATION);
  CHECK(bk_config_set_output(cfg, "somewhere") == BK_OK);
  CHECK(std::string(bk_config_output(cfg)) == "somewhere");

  Owned text;
  REQUIRE(bk_config_render(cfg, &text.p) == BK_OK);
  CHECK(text.str().find("seed = 42") != std::string::npos);
  bk_config* copy = nullptr;
  REQUIRE(bk_config_parse(text.p, &copy) == BK_OK);
  bk_config_values w{};
  REQUIRE(bk_config_get(copy, &w) == BK_OK);
  CHECK(w.seed == 42);
  bk_config_free(copy);
  bk_config_free(cfg);
  bk_config_free(nullptr);

  bk_config* bad = nullptr;
  CHECK(bk_config_parse("a = 0.5\nb = 0.8\np = 1\nr = 2\nepsilon = 1\nnoise.family = normal\n", &bad) ==
        BK_ERR_VALIDATION);
  CHECK(bad == nullptr);
  CHECK(std::string(bk_last_error()).find("1 - |a|") != std::string::npos);
  CHECK(bk_config_parse("x = 1\n", &bad) == BK_ERR_PARSE);
  CHECK(bk_config_load("/nonexistent.cfg", &bad) == BK_ERR_IO);
}

TEST_CASE("series handle") {
  bk_config* cfg = nullptr;
  REQUIRE(bk_config_parse(kConfig, &cfg) == BK_OK);
  bk_series* series = nullptr;
  REQUIRE(bk_series_run(cfg, &series) == BK_OK);
  REQUIRE(bk_series_size(series) == 16);
  bk_series_row row{}, prev{};
  for (size_t i = 0; i < 16; ++i) {
    REQUIRE(bk_series_row_at(series, i, &row) == BK_OK);
    CHECK(row.n == i + 1);
    CHECK(row.partial_sum >= prev.partial_sum);
    prev = row;
  }
  CHECK(bk_series_row_at(series, 16, &row) == BK_ERR_INVALID_ARGUMENT);
  const bk_verdict v = bk_series_verdict(series);
  CHECK((v == BK_VERDICT_STABILIZED || v == BK_VERDICT_FLOOR_LIMITED || v == BK_VERDICT_GROWING));
  Owned csv;
  REQUIRE(bk_series_csv(series, &csv.p) == BK_OK);
  CHECK(csv.str().starts_with("n,p_hat,"));
  bk_series_free(series);
  bk_config_free(cfg);
}

TEST_CASE("reports and the full run") {
  bk_config* cfg = nullptr;
  REQUIRE(bk_config_parse(kConfig, &cfg) == BK_OK);
  const auto prefix = (std::filesystem::temp_directory_path() / "bklab_c_api_run").string();
  REQUIRE(bk_config_set_output(cfg, prefix.c_str()) == BK_OK);

  Owned text, csv, weights, paths, report, summary;
  REQUIRE(bk_spectrum_report(cfg, &text.p, &csv.p) == BK_OK);
  CHECK(csv.str().starts_with("a,b,stable"));
  REQUIRE(bk_weights_csv(cfg, 5, &weights.p) == BK_OK);
  const std::string w = weights.str();
  CHECK(std::count(w.begin(), w.end(), '\n') == 7);
  REQUIRE(bk_paths_csv(cfg, 2, &paths.p) == BK_OK);
  CHECK(paths.str().starts_with("path,k,theta,xi,partial_sum\n"));
  int failures = -1;
  REQUIRE(bk_verify(cfg, &failures, &report.p) == BK_OK);
  CHECK(failures == 0);

  bk_verdict verdict = BK_VERDICT_GROWING;
  REQUIRE(bk_run(cfg, &verdict, &summary.p) == BK_OK);
  CHECK(std::filesystem::exists(prefix + ".series.csv"));
  CHECK(std::filesystem::exists(prefix + ".spectrum.csv"));
  CHECK(std::filesystem::exists(prefix + ".summary.txt"));
  bk_config_free(cfg);
}
