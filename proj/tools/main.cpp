// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "elaasim/estimators.hpp"
#include "elaasim/polar_dictionary.hpp"
#include "elaasim/rng.hpp"
#include "elaasim/sim.hpp"

namespace {

using namespace elaasim;

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  int verbosity = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path,
                  "configuration file (default from ELAASIM_CONFIG)")
      ->envname("ELAASIM_CONFIG");
  cmd->add_option("--set", opts.overrides, "override a config key, key=value (repeatable)");
  cmd->add_flag("-v,--verbose", opts.verbosity, "increase verbosity");
}

ScenarioConfig resolve_config(const CommonOpts& opts) {
  ScenarioConfig config;
  if (!opts.config_path.empty()) config = load_config_file(opts.config_path);
  for (const std::string& kv : opts.overrides) apply_override(config, kv);
  config.validate();
  return config;
}

std::string config_key_footer() {
  std::string footer = "Configuration keys (config file or --set key=value):\n";
  for (const ConfigKey& key : config_keys()) {
    footer += "  ";
    footer += key.name;
    for (std::size_t i = key.name.size(); i < 28; ++i) footer += ' ';
    footer += key.description;
    footer += '\n';
  }
  return footer;
}

std::string fmt6(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string mask_summary(const arma::uvec& mask) {
  const arma::uword ones = arma::accu(mask);
  if (ones == 0) return "empty";
  if (ones == mask.n_elem) return "all-ones";
  arma::uword first = 0, last = 0;
  bool seen = false;
  for (arma::uword n = 0; n < mask.n_elem; ++n) {
    if (mask(n) != 0) {
      if (!seen) first = n;
      last = n;
      seen = true;
    }
  }
  return "ones=" + std::to_string(ones) + " span=[" + std::to_string(first + 1) + "," +
         std::to_string(last + 1) + "]";
}

void print_true_paths(const ScenarioConfig& config, const Scenario& scenario) {
  const ArrayGeometry geom(config.n_antennas, config.spacing_m);
  const std::size_t mid = scenario.paths.subcarrier_wavenumbers.size() / 2;
  const double lambda_mid = 2.0 * kPi / scenario.paths.subcarrier_wavenumbers[mid];
  for (std::size_t l = 0; l < scenario.paths.paths.size(); ++l) {
    const Path& p = scenario.paths.paths[l];
    const char* kind = p.mask_case == MaskCase::kStationary  ? "stationary"
                       : p.mask_case == MaskCase::kBinary    ? "binary"
                                                             : "nonbinary";
    std::string mask_text;
    if (p.mask_case == MaskCase::kStationary) {
      mask_text = "all-ones";
    } else if (p.mask_case == MaskCase::kBinary) {
      mask_text = "interval [" + std::to_string(std::lround(std::min(p.vr_lo, p.vr_hi))) +
                  "," + std::to_string(std::lround(std::max(p.vr_lo, p.vr_hi))) + "]";
    } else {
      const arma::vec m = vr_mask(p, geom, lambda_mid);
      mask_text = "knife-edge min=" + fmt6(m.min()) + " max=" + fmt6(m.max());
    }
    std::cout << "  path " << l << ": case=" << kind << " angle=" << fmt6(p.angle)
              << " r=" << fmt6(p.distance) << " |g|=" << fmt6(std::abs(p.gain))
              << " mask: " << mask_text << "\n";
  }
}

int cmd_sweep(const CommonOpts& opts, const std::string& axis_arg, const std::string& out_csv,
              const std::string& out_plot, int workers) {
  const ScenarioConfig config = resolve_config(opts);
  const std::string axis_text = !axis_arg.empty() ? axis_arg : config.axis;
  if (axis_text.empty()) {
    throw std::invalid_argument("axis: no sweep axis given (use --axis or the axis config key)");
  }
  const SweepAxis axis = parse_axis(axis_text);
  if (opts.verbosity > 0) {
    std::cerr << "sweep: " << axis.values.size() << " axis point(s), " << config.n_iter
              << " trial(s) each, " << workers << " worker(s)\n";
  }
  const SweepResult result = sweep(config, axis, workers);
  emit_csv(result, out_csv);
  if (!out_plot.empty()) emit_plot(result, out_plot);
  std::cout << format_summary(result);
  return 0;
}

int cmd_trial(const CommonOpts& opts, std::uint64_t seed, bool seed_given) {
  const ScenarioConfig config = resolve_config(opts);
  if (!seed_given) seed = derive_trial_seed(config.master_seed, 0, 0);
  pin_blas_single_thread();

  TrialArtifacts artifacts;
  const TrialRecord record = run_trial(config, seed, nullptr, &artifacts);

  if (opts.verbosity > 0) {
    std::cout << "seed " << seed << "\n";
    std::cout << "true paths:\n";
    print_true_paths(config, artifacts.scenario);
  }
  for (std::size_t e = 0; e < record.estimator_names.size(); ++e) {
    if (record.errors[e].empty()) {
      std::cout << record.estimator_names[e] << " " << fmt6(record.nmse_db[e]) << "\n";
    } else {
      std::cout << record.estimator_names[e] << " error: " << record.errors[e] << "\n";
    }
    if (opts.verbosity > 0 && !artifacts.reports[e].vr_masks.empty()) {
      const EstimateReport& report = artifacts.reports[e];
      for (std::size_t l = 0; l < report.vr_masks.size(); ++l) {
        std::cout << "  decoded mask " << l << ": " << mask_summary(report.vr_masks[l])
                  << "\n";
      }
    }
  }
  return 0;
}

int cmd_dict_cache(const CommonOpts& opts, const std::string& out_path, bool force) {
  const ScenarioConfig config = resolve_config(opts);
  DictionaryCacheKey key;
  key.n_antennas = static_cast<std::uint32_t>(config.n_antennas);
  key.spacing = config.spacing_m;
  key.carrier_hz = config.carrier_hz;
  key.beta = config.beta;
  key.rings = static_cast<std::uint32_t>(config.rings);
  key.theta_min = config.theta_min_rad;
  key.theta_max = config.theta_max_rad;
  key.atom_override = static_cast<std::uint32_t>(config.atom_override);

  if (!force && std::filesystem::exists(out_path)) {
    std::string reason;
    const auto existing = load_dictionary_cache(out_path, &reason);
    if (existing && existing->key == key) {
      std::cout << "cache up to date: " << out_path << " (S=" << existing->dict.size()
                << ")\n";
      return 0;
    }
    std::cerr << "rebuilding cache: "
              << (existing ? std::string("key differs from the configuration") : reason)
              << "\n";
  }

  const auto start = std::chrono::steady_clock::now();
  const PolarDictionary dict = build_dictionary(
      ArrayGeometry(config.n_antennas, config.spacing_m), config.k_c(), config.dict_spec());
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  write_dictionary_cache(out_path, key, dict);
  std::cout << "S=" << dict.size() << " path=" << out_path << "\n";
  std::cerr << "build time: " << fmt6(elapsed.count()) << " s\n";
  return 0;
}

int cmd_show_config(const CommonOpts& opts) {
  const ScenarioConfig config = resolve_config(opts);
  std::cout << serialize_config(config);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field ELAA uplink channel estimation simulator"};
  app.require_subcommand(1);
  app.footer(config_key_footer());

  CommonOpts sweep_opts;
  std::string axis_arg, out_csv, out_plot;
  int workers = 1;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Monte Carlo sweep over SNR or L; writes CSV (and SVG)");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--axis", axis_arg, "sweep axis, e.g. snr=-10:5:10 or l=2:2:10");
  sweep_cmd->add_option("--out", out_csv, "CSV output path")->required();
  sweep_cmd->add_option("--plot", out_plot, "SVG plot output path");
  sweep_cmd->add_option("--workers", workers, "worker threads (results do not depend on this)");

  CommonOpts trial_opts;
  std::uint64_t seed = 0;
  CLI::App* trial_cmd = app.add_subcommand("trial", "run one seeded trial and print NMSEs");
  add_common(trial_cmd, trial_opts);
  CLI::Option* seed_opt =
      trial_cmd->add_option("--seed", seed, "trial seed (default: derived from master_seed)");

  CommonOpts cache_opts;
  std::string cache_out;
  bool force = false;
  CLI::App* cache_cmd =
      app.add_subcommand("dict-cache", "build and store the polar dictionary cache");
  add_common(cache_cmd, cache_opts);
  cache_cmd->add_option("--out", cache_out, "cache file path")->required();
  cache_cmd->add_flag("--force", force, "rebuild even if a matching cache exists");

  CommonOpts show_opts;
  CLI::App* show_cmd = app.add_subcommand("show-config", "print the resolved configuration");
  add_common(show_cmd, show_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts, axis_arg, out_csv, out_plot, workers);
    if (trial_cmd->parsed()) return cmd_trial(trial_opts, seed, seed_opt->count() > 0);
    if (cache_cmd->parsed()) return cmd_dict_cache(cache_opts, cache_out, force);
    if (show_cmd->parsed()) return cmd_show_config(show_opts);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
