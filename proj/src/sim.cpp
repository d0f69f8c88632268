// SPDX-License-Identifier: Apache-2.0

#include "elaasim/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "elaasim/rng.hpp"

// Resolves when armadillo links against OpenBLAS; stays null otherwise.
extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace elaasim {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty()) throw std::invalid_argument("config key '" + key + "': empty value");
  errno = 0;
  char* end = nullptr;
  const double parsed = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || errno == ERANGE) {
    throw std::invalid_argument("config key '" + key + "': cannot parse number '" + v + "'");
  }
  return parsed;
}

int parse_int(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty()) throw std::invalid_argument("config key '" + key + "': empty value");
  errno = 0;
  char* end = nullptr;
  const long parsed = std::strtol(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE || parsed < INT_MIN || parsed > INT_MAX) {
    throw std::invalid_argument("config key '" + key + "': cannot parse integer '" + v + "'");
  }
  return static_cast<int>(parsed);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty() || v[0] == '-') {
    throw std::invalid_argument("config key '" + key + "': cannot parse seed '" + v + "'");
  }
  errno = 0;
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE) {
    throw std::invalid_argument("config key '" + key + "': cannot parse seed '" + v + "'");
  }
  return parsed;
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "0" || v == "false") return false;
  if (v == "1" || v == "true") return true;
  throw std::invalid_argument("config key '" + key + "': expected 0/1/true/false, got '" + v + "'");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

ConfigKey dkey(const char* name, const char* desc, double ScenarioConfig::*member) {
  std::string key = name;
  return {key, desc,
          [member, key](ScenarioConfig& c, const std::string& v) { c.*member = parse_double(key, v); },
          [member](const ScenarioConfig& c) { return format_double(c.*member); }};
}

ConfigKey ikey(const char* name, const char* desc, int ScenarioConfig::*member) {
  std::string key = name;
  return {key, desc,
          [member, key](ScenarioConfig& c, const std::string& v) { c.*member = parse_int(key, v); },
          [member](const ScenarioConfig& c) { return std::to_string(c.*member); }};
}

ConfigKey skey(const char* name, const char* desc, std::string ScenarioConfig::*member) {
  std::string key = name;
  return {key, desc,
          [member](ScenarioConfig& c, const std::string& v) { c.*member = trim(v); },
          [member](const ScenarioConfig& c) { return c.*member; }};
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

bool prob_or_nan(double p) { return std::isnan(p) || (p > 0.0 && p < 1.0); }

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    k.push_back(ikey("n_antennas", "array size N", &ScenarioConfig::n_antennas));
    k.push_back(dkey("spacing_m", "antenna spacing d in meters", &ScenarioConfig::spacing_m));
    k.push_back(dkey("carrier_hz", "carrier frequency in Hz", &ScenarioConfig::carrier_hz));
    k.push_back(dkey("bandwidth_hz", "bandwidth in Hz", &ScenarioConfig::bandwidth_hz));
    k.push_back(ikey("n_subcarriers", "pilot subcarrier count M", &ScenarioConfig::n_subcarriers));
    k.push_back(ikey("n_pilots", "pilot repetitions T", &ScenarioConfig::n_pilots));
    k.push_back(ikey("n_paths", "dominant path count L", &ScenarioConfig::n_paths));
    k.push_back(dkey("snr_db", "pilot SNR in dB (inf disables noise)", &ScenarioConfig::snr_db));
    k.push_back(dkey("r_min_m", "minimum scatterer distance in meters", &ScenarioConfig::r_min_m));
    k.push_back(dkey("r_max_m", "maximum scatterer distance in meters", &ScenarioConfig::r_max_m));
    k.push_back(dkey("theta_min_rad", "minimum scatterer angle in radians", &ScenarioConfig::theta_min_rad));
    k.push_back(dkey("theta_max_rad", "maximum scatterer angle in radians", &ScenarioConfig::theta_max_rad));
    k.push_back(dkey("theta_edge_max_rad", "diffraction-edge deviation bound in radians", &ScenarioConfig::theta_edge_max_rad));
    k.push_back(dkey("mask_mix_stationary", "relative weight of stationary masks", &ScenarioConfig::mask_mix_stationary));
    k.push_back(dkey("mask_mix_binary", "relative weight of binary masks", &ScenarioConfig::mask_mix_binary));
    k.push_back(dkey("mask_mix_nonbinary", "relative weight of knife-edge masks", &ScenarioConfig::mask_mix_nonbinary));
    k.push_back(dkey("beta", "dictionary ring coherence parameter", &ScenarioConfig::beta));
    k.push_back(ikey("rings", "dictionary distance rings per angle (incl. far field)", &ScenarioConfig::rings));
    k.push_back(ikey("atom_override", "cap on dictionary atoms, 0 = full grid", &ScenarioConfig::atom_override));
    k.push_back(dkey("temperature", "emission sigmoid steepness", &ScenarioConfig::temperature));
    k.push_back(ikey("l_hat_factor", "support budget multiplier (L_hat = factor * L)", &ScenarioConfig::l_hat_factor));
    k.push_back(dkey("p_stay", "VR state persistence probability (nan = 1 - 1/N)", &ScenarioConfig::p_stay));
    k.push_back(dkey("p_switch", "VR state switch probability (nan = 1/N)", &ScenarioConfig::p_switch));
    k.push_back(dkey("p_init_in", "initial in-VR probability", &ScenarioConfig::p_init_in));
    k.push_back(dkey("p_init_out", "initial out-of-VR probability", &ScenarioConfig::p_init_out));
    k.push_back(ikey("n_iter", "Monte Carlo trials per axis point", &ScenarioConfig::n_iter));
    k.push_back({"master_seed", "root seed for per-trial seed derivation",
                 [](ScenarioConfig& c, const std::string& v) { c.master_seed = parse_u64("master_seed", v); },
                 [](const ScenarioConfig& c) { return std::to_string(c.master_seed); }});
    k.push_back(skey("estimators", "comma-separated estimator list (ls, psomp, subarray<k>, vrhmm, genie)", &ScenarioConfig::estimators));
    k.push_back(skey("axis", "default sweep axis, e.g. snr=-10:5:10 or l=2:2:10", &ScenarioConfig::axis));
    k.push_back(dkey("residual_stop", "early-stop residual fraction, 0 = fixed iteration count", &ScenarioConfig::residual_stop));
    k.push_back({"mask_selection_dictionary", "also mask the selection dictionary (0/1)",
                 [](ScenarioConfig& c, const std::string& v) { c.mask_selection_dictionary = parse_bool("mask_selection_dictionary", v); },
                 [](const ScenarioConfig& c) { return c.mask_selection_dictionary ? std::string("1") : std::string("0"); }});
    return k;
  }();
  return keys;
}

void ScenarioConfig::validate() const {
  require(n_antennas >= 2, "n_antennas: need at least 2 antennas");
  require(spacing_m > 0.0, "spacing_m: must be positive");
  require(carrier_hz > 0.0, "carrier_hz: must be positive");
  require(bandwidth_hz > 0.0 && bandwidth_hz < 2.0 * carrier_hz,
          "bandwidth_hz: must be positive and below twice the carrier");
  require(n_subcarriers >= 1, "n_subcarriers: must be positive");
  require(n_pilots >= 1, "n_pilots: must be positive");
  require(n_paths >= 1, "n_paths: must be positive");
  require(!std::isnan(snr_db), "snr_db: must be a number or inf");
  require(r_min_m > 0.0, "r_min_m: must be positive");
  require(r_max_m >= r_min_m, "r_max_m: must be >= r_min_m");
  require(theta_min_rad < theta_max_rad, "theta_min_rad: must be below theta_max_rad");
  require(theta_min_rad >= -kPi / 2 && theta_max_rad <= kPi / 2,
          "theta_max_rad: angle range must lie within [-pi/2, pi/2]");
  require(theta_edge_max_rad >= 0.0, "theta_edge_max_rad: must be non-negative");
  require(mask_mix_stationary >= 0.0, "mask_mix_stationary: must be non-negative");
  require(mask_mix_binary >= 0.0, "mask_mix_binary: must be non-negative");
  require(mask_mix_nonbinary >= 0.0, "mask_mix_nonbinary: must be non-negative");
  require(mask_mix_stationary + mask_mix_binary + mask_mix_nonbinary > 0.0,
          "mask_mix_stationary: mask mix weights must not all be zero");
  require(beta > 0.0, "beta: must be positive");
  require(rings >= 1, "rings: must be positive");
  require(atom_override >= 0, "atom_override: must be non-negative");
  require(atom_override <= n_antennas * rings,
          "atom_override: exceeds the dictionary grid size");
  require(temperature > 0.0, "temperature: must be positive");
  require(l_hat_factor >= 1, "l_hat_factor: must be positive");
  require(prob_or_nan(p_stay), "p_stay: must be in (0, 1) or nan");
  require(prob_or_nan(p_switch), "p_switch: must be in (0, 1) or nan");
  if (!std::isnan(p_stay) && !std::isnan(p_switch)) {
    require(std::abs(p_stay + p_switch - 1.0) <= 1e-12, "p_switch: p_stay + p_switch must be 1");
  }
  require(p_init_in > 0.0 && p_init_in < 1.0, "p_init_in: must be in (0, 1)");
  require(p_init_out > 0.0 && p_init_out < 1.0, "p_init_out: must be in (0, 1)");
  require(std::abs(p_init_in + p_init_out - 1.0) <= 1e-12,
          "p_init_out: p_init_in + p_init_out must be 1");
  require(n_iter >= 1, "n_iter: must be positive");
  require(residual_stop >= 0.0, "residual_stop: must be non-negative");
  parse_estimators(estimators);
  if (!trim(axis).empty()) parse_axis(axis);
}

ScenarioParams ScenarioConfig::scenario_params() const {
  return ScenarioParams{ArrayGeometry(n_antennas, spacing_m),
                        carrier_hz,
                        bandwidth_hz,
                        n_subcarriers,
                        n_paths,
                        r_min_m,
                        r_max_m,
                        theta_min_rad,
                        theta_max_rad,
                        theta_edge_max_rad,
                        {mask_mix_stationary, mask_mix_binary, mask_mix_nonbinary}};
}

HmmParams ScenarioConfig::hmm_params() const {
  HmmParams p;
  if (std::isnan(p_switch) && std::isnan(p_stay)) {
    p = HmmParams::defaults(n_antennas);
  } else if (std::isnan(p_stay)) {
    p.p_switch = p_switch;
    p.p_stay = 1.0 - p_switch;
  } else if (std::isnan(p_switch)) {
    p.p_stay = p_stay;
    p.p_switch = 1.0 - p_stay;
  } else {
    p.p_stay = p_stay;
    p.p_switch = p_switch;
  }
  p.p_init_in = p_init_in;
  p.p_init_out = p_init_out;
  p.temperature = temperature;
  return p;
}

DictGridSpec ScenarioConfig::dict_spec() const {
  DictGridSpec spec;
  spec.theta_min = theta_min_rad;
  spec.theta_max = theta_max_rad;
  spec.beta = beta;
  spec.rings = rings;
  spec.atom_override = atom_override;
  return spec;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);

  ScenarioConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected key = value, got '" + text + "'");
    }
    try {
      apply_override(config, text);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

void apply_override(ScenarioConfig& config, const std::string& key_value) {
  const auto eq = key_value.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("expected key=value, got '" + key_value + "'");
  }
  const std::string key = trim(key_value.substr(0, eq));
  const std::string value = trim(key_value.substr(eq + 1));
  for (const ConfigKey& entry : config_keys()) {
    if (entry.name == key) {
      entry.set(config, value);
      return;
    }
  }
  throw std::invalid_argument("unknown config key '" + key + "'");
}

std::string serialize_config(const ScenarioConfig& config) {
  std::string out;
  for (const ConfigKey& entry : config_keys()) {
    out += entry.name;
    out += " = ";
    out += entry.get(config);
    out += '\n';
  }
  return out;
}

std::vector<EstimatorSpec> parse_estimators(const std::string& csv) {
  std::vector<EstimatorSpec> specs;
  std::stringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const std::string name = trim(item);
    if (name.empty()) continue;
    EstimatorSpec spec;
    spec.name = name;
    if (name == "ls") {
      spec.kind = EstimatorKind::kLs;
    } else if (name == "psomp") {
      spec.kind = EstimatorKind::kPSomp;
    } else if (name == "vrhmm") {
      spec.kind = EstimatorKind::kVrHmm;
    } else if (name == "genie") {
      spec.kind = EstimatorKind::kGenie;
    } else if (name.rfind("subarray", 0) == 0 && name.size() > 8) {
      spec.kind = EstimatorKind::kSubarray;
      spec.n_subarrays = parse_int("estimators", name.substr(8));
      if (spec.n_subarrays < 1) {
        throw std::invalid_argument("estimators: subarray count must be positive in '" + name + "'");
      }
    } else {
      throw std::invalid_argument("estimators: unknown estimator '" + name + "'");
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

SweepAxis parse_axis(const std::string& text) {
  const std::string spec = trim(text);
  const auto eq = spec.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("axis: expected <name>=<values>, got '" + spec + "'");
  }
  const std::string name = trim(spec.substr(0, eq));
  const std::string values = trim(spec.substr(eq + 1));

  SweepAxis axis;
  if (name == "snr") {
    axis.kind = SweepAxis::Kind::kSnrDb;
  } else if (name == "l") {
    axis.kind = SweepAxis::Kind::kPaths;
  } else {
    throw std::invalid_argument("axis: unknown axis '" + name + "' (use snr or l)");
  }

  const auto c1 = values.find(':');
  if (c1 == std::string::npos) {
    axis.values.push_back(parse_double("axis", values));
  } else {
    const auto c2 = values.find(':', c1 + 1);
    if (c2 == std::string::npos) {
      throw std::invalid_argument("axis: expected start:step:stop, got '" + values + "'");
    }
    const double start = parse_double("axis", values.substr(0, c1));
    const double step = parse_double("axis", values.substr(c1 + 1, c2 - c1 - 1));
    const double stop = parse_double("axis", values.substr(c2 + 1));
    if (step == 0.0) {
      if (start != stop) throw std::invalid_argument("axis: zero step with start != stop");
      axis.values.push_back(start);
    } else if ((stop - start) * step < 0.0) {
      throw std::invalid_argument("axis: step walks away from stop");
    } else {
      const double tol = 1e-9 * std::max(1.0, std::abs(step));
      for (int k = 0;; ++k) {
        const double v = start + k * step;
        if (step > 0.0 ? v > stop + tol : v < stop - tol) break;
        axis.values.push_back(v);
      }
    }
  }

  for (double& v : axis.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("axis: values must be finite");
    if (axis.kind == SweepAxis::Kind::kPaths) {
      const double rounded = std::round(v);
      if (std::abs(v - rounded) > 1e-9 || rounded < 1.0) {
        throw std::invalid_argument("axis: path counts must be positive integers");
      }
      v = rounded;
    }
  }
  if (axis.values.empty()) throw std::invalid_argument("axis: no values");
  return axis;
}

double nmse_db(const ChannelTensor& h_true, const ChannelTensor& h_est) {
  if (arma::size(h_true.values) != arma::size(h_est.values)) {
    throw std::invalid_argument("nmse_db: dimension mismatch");
  }
  const double ref = arma::norm(h_true.values, "fro");
  if (ref == 0.0) throw std::invalid_argument("nmse_db: zero reference channel");
  const double err = arma::norm(h_true.values - h_est.values, "fro");
  if (err == 0.0) return kNmseFloorDb;
  return std::max(20.0 * std::log10(err / ref), kNmseFloorDb);
}

namespace {

EstimateReport run_one_estimator(const EstimatorSpec& spec, const PilotObservation& obs,
                                 const Scenario& scenario, const ScenarioConfig& config,
                                 const ArrayGeometry& geom, const PolarDictionary* dict) {
  switch (spec.kind) {
    case EstimatorKind::kLs:
      return ls_estimate(obs);
    case EstimatorKind::kPSomp:
      return p_somp(obs, *dict, config.l_hat());
    case EstimatorKind::kSubarray:
      return subarray_p_somp(obs, geom, config.k_c(), spec.n_subarrays, config.l_hat(),
                             config.dict_spec());
    case EstimatorKind::kVrHmm: {
      VrSompOptions options;
      options.residual_stop = config.residual_stop;
      options.mask_selection_dictionary = config.mask_selection_dictionary;
      return vr_hmm_p_somp(obs, *dict, config.l_hat(), config.hmm_params(), options);
    }
    case EstimatorKind::kGenie:
      return genie_vr_hmm_p_somp(obs, scenario.paths, geom,
                                 static_cast<int>(scenario.paths.paths.size()),
                                 config.hmm_params());
  }
  throw std::logic_error("run_one_estimator: unhandled estimator kind");
}

bool needs_dictionary(const std::vector<EstimatorSpec>& specs) {
  return std::any_of(specs.begin(), specs.end(), [](const EstimatorSpec& s) {
    return s.kind == EstimatorKind::kPSomp || s.kind == EstimatorKind::kVrHmm;
  });
}

}  // namespace

TrialRecord run_trial(const ScenarioConfig& config, std::uint64_t trial_seed,
                      const TrialContext* context, TrialArtifacts* artifacts,
                      const Scenario* injected_scenario) {
  config.validate();
  const std::vector<EstimatorSpec> specs = parse_estimators(config.estimators);
  const ScenarioParams params = config.scenario_params();

  Rng rng(trial_seed);
  Scenario scenario = injected_scenario ? *injected_scenario : sample_scenario(params, rng);
  const PilotObservation obs =
      observe_pilots(scenario.channel, config.snr_db, config.n_pilots, rng);

  const PolarDictionary* dict = (context != nullptr) ? context->dictionary : nullptr;
  PolarDictionary local_dict;
  if (needs_dictionary(specs)) {
    if (dict == nullptr) {
      local_dict = build_dictionary(params.geom, config.k_c(), config.dict_spec());
      dict = &local_dict;
    } else if (dict->atoms.n_rows != static_cast<arma::uword>(config.n_antennas)) {
      throw std::invalid_argument("run_trial: context dictionary does not match the geometry");
    }
  }

  TrialRecord record;
  for (const EstimatorSpec& spec : specs) {
    record.estimator_names.push_back(spec.name);
    try {
      EstimateReport report = run_one_estimator(spec, obs, scenario, config, params.geom, dict);
      record.nmse_db.push_back(nmse_db(scenario.channel, ChannelTensor{report.channel_estimate}));
      record.errors.emplace_back();
      if (artifacts) artifacts->reports.push_back(std::move(report));
    } catch (const std::exception& e) {
      record.nmse_db.push_back(std::numeric_limits<double>::quiet_NaN());
      record.errors.emplace_back(e.what());
      if (artifacts) artifacts->reports.emplace_back();
    }
  }
  if (artifacts) {
    artifacts->scenario = std::move(scenario);
    artifacts->observation = obs;
  }
  return record;
}

void pin_blas_single_thread() {
  if (openblas_set_num_threads != nullptr) openblas_set_num_threads(1);
}

SweepResult sweep(const ScenarioConfig& config, const SweepAxis& axis, int n_workers) {
  config.validate();
  if (axis.values.empty()) throw std::invalid_argument("sweep: empty axis");
  pin_blas_single_thread();

  const std::vector<EstimatorSpec> specs = parse_estimators(config.estimators);

  std::vector<ScenarioConfig> point_configs;
  point_configs.reserve(axis.values.size());
  for (const double v : axis.values) {
    ScenarioConfig point = config;
    if (axis.kind == SweepAxis::Kind::kSnrDb) {
      point.snr_db = v;
    } else {
      point.n_paths = static_cast<int>(std::lround(v));
    }
    point.validate();
    point_configs.push_back(std::move(point));
  }

  PolarDictionary shared_dict;
  TrialContext context;
  if (needs_dictionary(specs)) {
    shared_dict = build_dictionary(ArrayGeometry(config.n_antennas, config.spacing_m),
                                   config.k_c(), config.dict_spec());
    context.dictionary = &shared_dict;
  }

  const std::size_t per_point = static_cast<std::size_t>(config.n_iter);
  const std::size_t total = axis.values.size() * per_point;
  std::vector<TrialRecord> records(total);
  std::atomic<std::size_t> cursor{0};
  std::mutex failure_mutex;
  std::string failure;

  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = cursor.fetch_add(1);
      if (idx >= total) return;
      const std::size_t j = idx / per_point;
      const std::size_t i = idx % per_point;
      try {
        records[idx] = run_trial(point_configs[j],
                                 derive_trial_seed(config.master_seed, j, i), &context);
      } catch (const std::exception& e) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure.empty()) failure = e.what();
        return;
      }
    }
  };

  int worker_count = std::max(1, n_workers);
  if (static_cast<std::size_t>(worker_count) > total) worker_count = static_cast<int>(total);
  if (worker_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(worker_count));
    for (int w = 0; w < worker_count; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (!failure.empty()) throw std::runtime_error("sweep: trial failed: " + failure);

  SweepResult result;
  result.axis = axis;
  for (const EstimatorSpec& spec : specs) result.estimator_names.push_back(spec.name);
  result.cells.assign(axis.values.size(),
                      std::vector<SweepCell>(specs.size()));

  for (std::size_t j = 0; j < axis.values.size(); ++j) {
    for (std::size_t e = 0; e < specs.size(); ++e) {
      std::vector<double> db_values;
      db_values.reserve(per_point);
      for (std::size_t i = 0; i < per_point; ++i) {
        const TrialRecord& rec = records[j * per_point + i];
        if (rec.errors[e].empty()) db_values.push_back(rec.nmse_db[e]);
      }
      SweepCell& cell = result.cells[j][e];
      cell.n_trials = static_cast<int>(db_values.size());
      if (db_values.empty()) {
        cell.nmse_db = std::numeric_limits<double>::quiet_NaN();
        cell.mean_db = std::numeric_limits<double>::quiet_NaN();
        cell.stderr_db = 0.0;
        continue;
      }
      double mean_lin = 0.0;
      double mean_db = 0.0;
      for (const double db : db_values) {
        mean_lin += std::pow(10.0, db / 10.0);
        mean_db += db;
      }
      mean_lin /= static_cast<double>(db_values.size());
      mean_db /= static_cast<double>(db_values.size());
      cell.mean_db = mean_db;
      cell.nmse_db = mean_lin > 0.0 ? std::max(10.0 * std::log10(mean_lin), kNmseFloorDb)
                                    : kNmseFloorDb;
      if (db_values.size() >= 2 && mean_lin > 0.0) {
        double ss = 0.0;
        for (const double db : db_values) {
          const double lin = std::pow(10.0, db / 10.0);
          ss += (lin - mean_lin) * (lin - mean_lin);
        }
        const double se_lin =
            std::sqrt(ss / static_cast<double>(db_values.size() - 1)) /
            std::sqrt(static_cast<double>(db_values.size()));
        cell.stderr_db = 10.0 / std::log(10.0) * se_lin / mean_lin;
      } else {
        cell.stderr_db = 0.0;
      }
    }
  }
  return result;
}

}  // namespace elaasim
