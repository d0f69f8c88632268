// SPDX-License-Identifier: Apache-2.0
//
// Polar-domain dictionary: a grid of near-field steering vectors over angles
// uniform in sin(theta) and 1/s-spaced distance rings, plus one far-field
// (plane-wave) ring per angle. All sparse-recovery estimators share it.

#pragma once

#include <armadillo>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "elaasim/geometry.hpp"

namespace elaasim {

/// Marks a far-field (plane-wave) atom in atom_params.
inline constexpr double kFarFieldDistance = std::numeric_limits<double>::infinity();

struct AtomParam {
  double angle = 0.0;
  double distance = kFarFieldDistance;  // meters, or kFarFieldDistance
};

/// Grid parameters shared by every dictionary build.
struct DictGridSpec {
  double theta_min = -kPi / 3;
  double theta_max = kPi / 3;
  double beta = 1.2;   // ring coherence parameter
  int rings = 10;      // far-field ring + (rings-1) finite rings
  int atom_override = 0;  // >0: truncate to this many atoms (ring-major order)
};

struct PolarDictionary {
  arma::cx_mat atoms;                 // N x S, unit-norm columns
  std::vector<AtomParam> atom_params; // length S

  arma::uword size() const { return atoms.n_cols; }
};

/// `count` angles uniform in sin(theta) over [theta_min, theta_max],
/// endpoints included, strictly increasing.
std::vector<double> angular_grid(int count, std::pair<double, double> theta_range);

/// Distance rings for one angle: the far-field sentinel first, then
/// r_s = N^2 d^2 (1 - sin^2 theta) / (2 beta^2 lambda_c s) for s = 1..rings-1,
/// strictly decreasing.
std::vector<double> distance_rings(double theta, const ArrayGeometry& geom,
                                   double lambda_c, double beta, int rings);

/// Builds the N_angles x rings atom grid (ring-major: all angles of the
/// far-field ring first, then ring s = 1, ...). A positive atom_override
/// keeps only the first atom_override atoms, truncating the largest-s rings.
PolarDictionary build_dictionary(const ArrayGeometry& geom, double k_c,
                                 std::pair<double, double> theta_range,
                                 double beta, int rings, int atom_override = 0);

PolarDictionary build_dictionary(const ArrayGeometry& geom, double k_c,
                                 const DictGridSpec& spec);

/// Atom block vertically repeated T times; column norms become sqrt(T).
arma::cx_mat stack_for_pilots(const PolarDictionary& dict, int n_pilots);

/// Cache key; a cache file is only valid for an exactly matching key.
struct DictionaryCacheKey {
  std::uint32_t n_antennas = 0;
  double spacing = 0.0;
  double carrier_hz = 0.0;
  double beta = 0.0;
  std::uint32_t rings = 0;
  double theta_min = 0.0;
  double theta_max = 0.0;
  std::uint32_t atom_override = 0;

  bool operator==(const DictionaryCacheKey&) const = default;
};

/// Binary cache: header (magic, version, key) + row-major complex<float>
/// payload. Lossy vs the double-precision build; the Monte Carlo harness
/// always rebuilds and never reads this file.
void write_dictionary_cache(const std::string& path, const DictionaryCacheKey& key,
                            const PolarDictionary& dict);

struct DictionaryCacheLoad {
  PolarDictionary dict;
  DictionaryCacheKey key;
};

/// Returns std::nullopt (with a reason) for a missing, corrupted, or
/// key-mismatched file.
std::optional<DictionaryCacheLoad> load_dictionary_cache(const std::string& path,
                                                         std::string* reason = nullptr);

}  // namespace elaasim
