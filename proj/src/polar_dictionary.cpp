// SPDX-License-Identifier: Apache-2.0

#include "elaasim/polar_dictionary.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace elaasim {

namespace {
constexpr char kCacheMagic[8] = {'E', 'L', 'A', 'A', 'D', 'I', 'C', 'T'};
constexpr std::uint32_t kCacheVersion = 1;

std::vector<AtomParam> grid_atom_params(const ArrayGeometry& geom, double k_c,
                                        std::pair<double, double> theta_range,
                                        double beta, int rings, int atom_override) {
  const std::vector<double> angles = angular_grid(geom.n_antennas, theta_range);
  const double lambda_c = 2.0 * kPi / k_c;

  std::vector<AtomParam> params;
  params.reserve(angles.size() * static_cast<std::size_t>(rings));
  // Ring-major: an atom-count override then truncates the largest-s rings.
  for (int ring = 0; ring < rings; ++ring) {
    for (const double theta : angles) {
      const std::vector<double> radii = distance_rings(theta, geom, lambda_c, beta, rings);
      params.push_back({theta, radii[static_cast<std::size_t>(ring)]});
    }
  }
  if (atom_override > 0) {
    if (static_cast<std::size_t>(atom_override) > params.size()) {
      throw std::invalid_argument("build_dictionary: atom override exceeds grid size");
    }
    params.resize(static_cast<std::size_t>(atom_override));
  }
  return params;
}
}  // namespace

std::vector<double> angular_grid(int count, std::pair<double, double> theta_range) {
  if (count < 1) throw std::invalid_argument("angular_grid: need at least one angle");
  const auto [theta_min, theta_max] = theta_range;
  if (!(theta_min < theta_max)) throw std::invalid_argument("angular_grid: empty angular range");
  if (theta_min < -kPi / 2 || theta_max > kPi / 2) {
    throw std::invalid_argument("angular_grid: range must lie within [-pi/2, pi/2]");
  }
  const double s_min = std::sin(theta_min);
  const double s_max = std::sin(theta_max);
  std::vector<double> angles(static_cast<std::size_t>(count));
  if (count == 1) {
    angles[0] = std::asin(0.5 * (s_min + s_max));
    return angles;
  }
  for (int i = 0; i < count; ++i) {
    const double s = s_min + (s_max - s_min) * i / (count - 1.0);
    angles[static_cast<std::size_t>(i)] = std::asin(s);
  }
  return angles;
}

std::vector<double> distance_rings(double theta, const ArrayGeometry& geom,
                                   double lambda_c, double beta, int rings) {
  if (rings < 1) throw std::invalid_argument("distance_rings: need at least one ring");
  std::vector<double> radii;
  radii.reserve(static_cast<std::size_t>(rings));
  radii.push_back(kFarFieldDistance);
  const double n_d = geom.n_antennas * geom.spacing;
  const double sin_theta = std::sin(theta);
  const double numerator = n_d * n_d * (1.0 - sin_theta * sin_theta);
  for (int s = 1; s < rings; ++s) {
    radii.push_back(numerator / (2.0 * beta * beta * lambda_c * s));
  }
  return radii;
}

PolarDictionary build_dictionary(const ArrayGeometry& geom, double k_c,
                                 std::pair<double, double> theta_range,
                                 double beta, int rings, int atom_override) {
  PolarDictionary dict;
  dict.atom_params = grid_atom_params(geom, k_c, theta_range, beta, rings, atom_override);

  const arma::uword s_total = static_cast<arma::uword>(dict.atom_params.size());
  dict.atoms.set_size(static_cast<arma::uword>(geom.n_antennas), s_total);
  for (arma::uword s = 0; s < s_total; ++s) {
    const AtomParam& p = dict.atom_params[s];
    dict.atoms.col(s) = std::isinf(p.distance)
                            ? far_field_steering_vector(p.angle, geom, k_c)
                            : steering_vector(p.angle, p.distance, geom, k_c);
  }
  return dict;
}

PolarDictionary build_dictionary(const ArrayGeometry& geom, double k_c,
                                 const DictGridSpec& spec) {
  return build_dictionary(geom, k_c, {spec.theta_min, spec.theta_max}, spec.beta,
                          spec.rings, spec.atom_override);
}

arma::cx_mat stack_for_pilots(const PolarDictionary& dict, int n_pilots) {
  if (n_pilots < 1) throw std::invalid_argument("stack_for_pilots: need T >= 1");
  return arma::repmat(dict.atoms, static_cast<arma::uword>(n_pilots), 1);
}

void write_dictionary_cache(const std::string& path, const DictionaryCacheKey& key,
                            const PolarDictionary& dict) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("dictionary cache: cannot open for writing: " + path);

  out.write(kCacheMagic, sizeof(kCacheMagic));
  auto put = [&out](const auto& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  };
  put(kCacheVersion);
  put(key.n_antennas);
  put(key.spacing);
  put(key.carrier_hz);
  put(key.beta);
  put(key.rings);
  put(key.theta_min);
  put(key.theta_max);
  put(key.atom_override);
  const std::uint64_t n_rows = dict.atoms.n_rows;
  const std::uint64_t n_cols = dict.atoms.n_cols;
  put(n_rows);
  put(n_cols);
  for (arma::uword r = 0; r < dict.atoms.n_rows; ++r) {
    for (arma::uword c = 0; c < dict.atoms.n_cols; ++c) {
      const std::complex<float> v(static_cast<float>(dict.atoms(r, c).real()),
                                  static_cast<float>(dict.atoms(r, c).imag()));
      put(v);
    }
  }
  if (!out) throw std::runtime_error("dictionary cache: write failed: " + path);
}

std::optional<DictionaryCacheLoad> load_dictionary_cache(const std::string& path,
                                                         std::string* reason) {
  auto fail = [reason](const std::string& why) -> std::optional<DictionaryCacheLoad> {
    if (reason) *reason = why;
    return std::nullopt;
  };

  std::ifstream in(path, std::ios::binary);
  if (!in) return fail("cannot open " + path);

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) {
    return fail("bad magic (corrupted or not a dictionary cache)");
  }
  auto get = [&in](auto& v) { in.read(reinterpret_cast<char*>(&v), sizeof(v)); };

  std::uint32_t version = 0;
  get(version);
  if (!in || version != kCacheVersion) return fail("unsupported cache version");

  DictionaryCacheLoad load;
  get(load.key.n_antennas);
  get(load.key.spacing);
  get(load.key.carrier_hz);
  get(load.key.beta);
  get(load.key.rings);
  get(load.key.theta_min);
  get(load.key.theta_max);
  get(load.key.atom_override);
  std::uint64_t n_rows = 0, n_cols = 0;
  get(n_rows);
  get(n_cols);
  if (!in) return fail("truncated header");
  if (n_rows != load.key.n_antennas || n_rows == 0 || n_cols == 0) {
    return fail("inconsistent dimensions in header");
  }

  load.dict.atoms.set_size(static_cast<arma::uword>(n_rows), static_cast<arma::uword>(n_cols));
  for (std::uint64_t r = 0; r < n_rows; ++r) {
    for (std::uint64_t c = 0; c < n_cols; ++c) {
      std::complex<float> v;
      get(v);
      load.dict.atoms(static_cast<arma::uword>(r), static_cast<arma::uword>(c)) =
          std::complex<double>(v.real(), v.imag());
    }
  }
  if (!in) return fail("truncated payload");

  // Grid parameters are fully determined by the key.
  const ArrayGeometry geom(static_cast<int>(load.key.n_antennas), load.key.spacing);
  const double k_c = 2.0 * kPi * load.key.carrier_hz / kSpeedOfLight;
  load.dict.atom_params =
      grid_atom_params(geom, k_c, {load.key.theta_min, load.key.theta_max}, load.key.beta,
                       static_cast<int>(load.key.rings),
                       static_cast<int>(load.key.atom_override));
  if (load.dict.atom_params.size() != n_cols) return fail("payload size does not match key");
  return load;
}

}  // namespace elaasim
