// Command-line front end. Talks to the library only through the C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bklab/bklab.h"

namespace {

struct ConfigDeleter {
  void operator()(bk_config* c) const { bk_config_free(c); }
};
using ConfigPtr = std::unique_ptr<bk_config, ConfigDeleter>;

struct CString {
  char* p = nullptr;
  ~CString() { bk_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replications;
  std::optional<std::string> out;
};

// Single-line diagnostic, exit status 1.
int report(bk_status status) {
  std::cerr << "bklab: " << bk_status_name(status) << ": " << bk_last_error() << '\n';
  return 1;
}

bk_status load(const CommonOptions& opts, ConfigPtr& cfg) {
  bk_config* raw = nullptr;
  if (bk_status s = bk_config_load(opts.config_path.c_str(), &raw); s != BK_OK) return s;
  cfg.reset(raw);
  if (opts.seed) {
    if (bk_status s = bk_config_set_seed(cfg.get(), *opts.seed); s != BK_OK) return s;
  }
  if (opts.replications) {
    if (bk_status s = bk_config_set_replications(cfg.get(), *opts.replications); s != BK_OK) return s;
  }
  if (opts.out) {
    if (bk_status s = bk_config_set_output(cfg.get(), opts.out->c_str()); s != BK_OK) return s;
  }
  return BK_OK;
}

bool write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) {
    std::cerr << "bklab: IoError: cannot write '" << path << "'\n";
    return false;
  }
  return true;
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Experiment config (key = value lines)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "Master seed, overrides the config");
  cmd->add_option("--replications", opts.replications, "Replications per grid point, overrides the config");
  cmd->add_option("--out", opts.out, "Output path prefix, overrides the config");
}

int cmd_spectrum(const CommonOptions& opts) {
  ConfigPtr cfg;
  if (bk_status s = load(opts, cfg); s != BK_OK) return report(s);
  CString text, csv;
  if (bk_status s = bk_spectrum_report(cfg.get(), &text.p, &csv.p); s != BK_OK) return report(s);
  std::cout << text.str();
  if (opts.out && !write_text(*opts.out + ".spectrum.csv", csv.str())) return 1;
  return 0;
}

int cmd_weights(const CommonOptions& opts, std::optional<std::size_t> horizon) {
  ConfigPtr cfg;
  if (bk_status s = load(opts, cfg); s != BK_OK) return report(s);
  bk_config_values values{};
  if (bk_status s = bk_config_get(cfg.get(), &values); s != BK_OK) return report(s);
  CString csv;
  const std::size_t h = horizon.value_or(static_cast<std::size_t>(values.grid_max));
  if (bk_status s = bk_weights_csv(cfg.get(), h, &csv.p); s != BK_OK) return report(s);
  if (opts.out) return write_text(*opts.out + ".weights.csv", csv.str()) ? 0 : 1;
  std::cout << csv.str();
  return 0;
}

int cmd_simulate(const CommonOptions& opts, std::uint64_t paths) {
  ConfigPtr cfg;
  if (bk_status s = load(opts, cfg); s != BK_OK) return report(s);
  CString csv;
  if (bk_status s = bk_paths_csv(cfg.get(), paths, &csv.p); s != BK_OK) return report(s);
  if (opts.out) return write_text(*opts.out + ".paths.csv", csv.str()) ? 0 : 1;
  std::cout << csv.str();
  return 0;
}

int cmd_series(const CommonOptions& opts) {
  ConfigPtr cfg;
  if (bk_status s = load(opts, cfg); s != BK_OK) return report(s);
  bk_verdict verdict = BK_VERDICT_STABILIZED;
  CString summary;
  if (bk_status s = bk_run(cfg.get(), &verdict, &summary.p); s != BK_OK) return report(s);
  std::cout << summary.str();
  std::cout << "wrote " << bk_config_output(cfg.get()) << ".{series.csv,spectrum.csv,summary.txt}\n";
  return static_cast<int>(verdict);
}

int cmd_verify(const CommonOptions& opts) {
  ConfigPtr cfg;
  if (bk_status s = load(opts, cfg); s != BK_OK) return report(s);
  int failures = 0;
  CString text;
  if (bk_status s = bk_verify(cfg.get(), &failures, &text.p); s != BK_OK) return report(s);
  std::cout << text.str();
  std::cout << (failures == 0 ? "all checks passed\n" : std::to_string(failures) + " check(s) failed\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bklab: AR(2) Baum-Katz series laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bk_version()));

  CommonOptions spectrum_opts, weights_opts, simulate_opts, series_opts, verify_opts;
  std::optional<std::size_t> horizon;
  std::uint64_t paths = 1;

  auto* spectrum = app.add_subcommand("spectrum", "Companion spectrum and envelope constants");
  add_common(spectrum, spectrum_opts);
  auto* weights = app.add_subcommand("weights", "Dump the weight table u_n and U(n)");
  add_common(weights, weights_opts);
  weights->add_option("--horizon", horizon, "Largest index (default: grid_max)");
  auto* simulate = app.add_subcommand("simulate", "Emit sample paths of length grid_max");
  add_common(simulate, simulate_opts);
  simulate->add_option("--paths", paths, "Number of paths")->check(CLI::PositiveNumber);
  auto* series = app.add_subcommand("series", "Full pipeline; exit code encodes the verdict");
  add_common(series, series_opts);
  auto* verify = app.add_subcommand("verify", "Run the invariant self-check suite");
  add_common(verify, verify_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*spectrum) return cmd_spectrum(spectrum_opts);
  if (*weights) return cmd_weights(weights_opts, horizon);
  if (*simulate) return cmd_simulate(simulate_opts, paths);
  if (*series) return cmd_series(series_opts);
  if (*verify) return cmd_verify(verify_opts);
  return 1;
}
