// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo harness: configuration, seeded trials, SNR / path-count
// sweeps, aggregation, and result serialization (CSV + SVG plot).

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "elaasim/estimators.hpp"
#include "elaasim/geometry.hpp"
#include "elaasim/polar_dictionary.hpp"
#include "elaasim/vr_hmm.hpp"

namespace elaasim {

/// NMSE values are clamped here; an exact estimate would otherwise be -inf.
inline constexpr double kNmseFloorDb = -300.0;

/// Full simulation configuration. Probability fields left as NaN are derived
/// from the antenna count (p_switch = 1/N, p_stay = 1 - 1/N).
struct ScenarioConfig {
  int n_antennas = 256;
  double spacing_m = 0.005;
  double carrier_hz = 30e9;
  double bandwidth_hz = 100e6;
  int n_subcarriers = 12;
  int n_pilots = 4;
  int n_paths = 6;
  double snr_db = 0.0;
  double r_min_m = 7.0;
  double r_max_m = 327.0;
  double theta_min_rad = -kPi / 3;
  double theta_max_rad = kPi / 3;
  double theta_edge_max_rad = 0.006;
  double mask_mix_stationary = 1.0 / 3;
  double mask_mix_binary = 1.0 / 3;
  double mask_mix_nonbinary = 1.0 / 3;
  double beta = 1.2;
  int rings = 10;
  int atom_override = 2555;
  double temperature = 20.0;
  int l_hat_factor = 2;
  double p_stay = std::numeric_limits<double>::quiet_NaN();
  double p_switch = std::numeric_limits<double>::quiet_NaN();
  double p_init_in = 0.55;
  double p_init_out = 0.45;
  int n_iter = 500;
  std::uint64_t master_seed = 1;
  std::string estimators = "ls,psomp,subarray8,subarray32,vrhmm,genie";
  std::string axis;  // default sweep axis, e.g. "snr=-10:5:10"; may be empty
  double residual_stop = 0.0;
  bool mask_selection_dictionary = false;

  /// Throws std::invalid_argument naming the offending key.
  void validate() const;

  int l_hat() const { return l_hat_factor * n_paths; }
  double k_c() const { return 2.0 * kPi * carrier_hz / kSpeedOfLight; }
  ScenarioParams scenario_params() const;
  HmmParams hmm_params() const;
  DictGridSpec dict_spec() const;
};

/// One settable/printable configuration key. The table drives the file
/// parser, --set overrides, serialization, and the --help key listing.
struct ConfigKey {
  std::string name;
  std::string description;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

const std::vector<ConfigKey>& config_keys();

/// Flat key = value text; '#' starts a comment. Unknown keys are errors.
ScenarioConfig load_config_file(const std::string& path);

/// Applies one "key=value" pair; throws std::invalid_argument on unknown keys.
void apply_override(ScenarioConfig& config, const std::string& key_value);

std::string serialize_config(const ScenarioConfig& config);

enum class EstimatorKind { kLs, kPSomp, kSubarray, kVrHmm, kGenie };

struct EstimatorSpec {
  std::string name;
  EstimatorKind kind = EstimatorKind::kLs;
  int n_subarrays = 0;  // kSubarray only
};

/// Parses "ls,psomp,subarray8,subarray32,vrhmm,genie"; "subarray<k>" takes
/// any positive k. Throws std::invalid_argument naming an unknown entry.
std::vector<EstimatorSpec> parse_estimators(const std::string& csv);

struct SweepAxis {
  enum class Kind { kSnrDb, kPaths } kind = Kind::kSnrDb;
  std::vector<double> values;

  std::string name() const { return kind == Kind::kSnrDb ? "snr" : "l"; }
  std::string label() const { return kind == Kind::kSnrDb ? "SNR (dB)" : "L"; }
};

/// "snr=start:step:stop" (stop included when exactly reached) or a single
/// "snr=value"; likewise "l=...". Path counts must be positive integers.
SweepAxis parse_axis(const std::string& text);

/// 10 log10(||H - H_hat||_F^2 / ||H||_F^2), clamped to kNmseFloorDb.
double nmse_db(const ChannelTensor& h_true, const ChannelTensor& h_est);

struct TrialRecord {
  std::vector<std::string> estimator_names;
  std::vector<double> nmse_db;      // NaN where the estimator failed
  std::vector<std::string> errors;  // empty string where it succeeded
};

/// Optional reusable inputs for run_trial; the dictionary must match the
/// configured geometry. Shared read-only across workers.
struct TrialContext {
  const PolarDictionary* dictionary = nullptr;
};

/// Everything a verbose caller may want to inspect after a trial.
struct TrialArtifacts {
  Scenario scenario;
  PilotObservation observation;
  std::vector<EstimateReport> reports;  // empty report where an estimator failed
};

/// One scenario + one noise draw, every selected estimator on the identical
/// observation. Deterministic given (config, trial_seed). Estimator failures
/// are recorded per estimator; the trial itself always completes.
TrialRecord run_trial(const ScenarioConfig& config, std::uint64_t trial_seed,
                      const TrialContext* context = nullptr,
                      TrialArtifacts* artifacts = nullptr,
                      const Scenario* injected_scenario = nullptr);

struct SweepCell {
  double nmse_db = 0.0;    // 10 log10 of the mean linear NMSE
  double mean_db = 0.0;    // mean of the per-trial dB values
  double stderr_db = 0.0;  // delta-method standard error of nmse_db
  int n_trials = 0;        // trials aggregated (failures excluded)
};

struct SweepResult {
  SweepAxis axis;
  std::vector<std::string> estimator_names;
  std::vector<std::vector<SweepCell>> cells;  // [axis point][estimator]
};

/// n_iter seeded trials per axis point. Trial seeds come from
/// derive_trial_seed(master_seed, axis_index, trial_index), so results are
/// byte-identical for any worker count.
SweepResult sweep(const ScenarioConfig& config, const SweepAxis& axis, int n_workers = 1);

/// Header `axis,estimator,nmse_db,stderr_db,n_trials`, one row per
/// (axis value, estimator), 6 significant digits, LF endings.
void emit_csv(const SweepResult& result, const std::string& path);

/// Deterministic standalone SVG line chart, one series per estimator.
void emit_plot(const SweepResult& result, const std::string& path);

/// Fixed-width text table of a sweep (both aggregation conventions shown).
std::string format_summary(const SweepResult& result);

/// Caps OpenBLAS at one thread when that symbol is present. Keeps results
/// bit-reproducible and avoids oversubscription with worker threads.
void pin_blas_single_thread();

}  // namespace elaasim
