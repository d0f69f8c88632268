// SPDX-License-Identifier: Apache-2.0
//
// Near-field ULA geometry, visibility-region masks, channel synthesis and
// pilot observation. Frequency-domain uplink model: a centered uniform linear
// array of N elements receives L dominant paths from near-field scatterers;
// each path carries its own per-antenna visibility mask (all-ones, binary
// interval, or a knife-edge diffraction amplitude profile).

#pragma once

#include <armadillo>
#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "elaasim/rng.hpp"

namespace elaasim {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Centered uniform linear array. Element n sits at delta_n * spacing along
/// the array axis with delta_n = (2n - N + 1)/2, so offsets are symmetric
/// about the array center (sum of offsets = 0).
struct ArrayGeometry {
  int n_antennas = 0;
  double spacing = 0.0;  // meters
  std::vector<double> element_offsets;  // delta_n, in units of spacing

  ArrayGeometry(int n, double d);
};

enum class MaskCase { kStationary, kBinary, kNonBinary };

/// One dominant propagation path. The visibility descriptor is case
/// dependent: binary masks carry two endpoints as 1-based positions in
/// [1, N]; non-binary masks carry the diffraction-edge angular deviation
/// seen from the array center.
struct Path {
  double angle = 0.0;     // radians, from array broadside
  double distance = 0.0;  // meters, scatterer to array center
  std::complex<double> gain{0.0, 0.0};
  MaskCase mask_case = MaskCase::kStationary;
  double vr_lo = 0.0;      // binary only
  double vr_hi = 0.0;      // binary only
  double theta_edge = 0.0; // non-binary only, radians
};

struct PathSet {
  std::vector<Path> paths;
  double carrier_wavenumber = 0.0;            // k_c, rad/m
  std::vector<double> subcarrier_wavenumbers; // k_m, rad/m, increasing
};

/// True channel, one column per subcarrier.
struct ChannelTensor {
  arma::cx_mat values;  // N x M
};

/// Stacked received pilots. Row layout is the project-wide convention
/// row = t*N + n (pilot-repetition blocks of N antenna rows).
struct PilotObservation {
  arma::cx_mat stacked;  // (N*T) x M
  double noise_variance = 0.0;  // sigma^2 per complex entry
  int n_antennas = 0;
  int n_pilots = 0;
};

/// Scenario-sampling inputs (the geometry-level slice of the full simulation
/// configuration).
struct ScenarioParams {
  ArrayGeometry geom;
  double carrier_hz = 0.0;
  double bandwidth_hz = 0.0;
  int n_subcarriers = 0;
  int n_paths = 0;
  double r_min = 0.0, r_max = 0.0;
  double theta_min = 0.0, theta_max = 0.0;
  double theta_edge_max = 0.0;
  std::array<double, 3> mask_mix{1.0 / 3, 1.0 / 3, 1.0 / 3};  // stationary, binary, non-binary
};

struct Scenario {
  PathSet paths;
  ChannelTensor channel;
};

/// Distance from a scatterer at (r, theta) to the element offset delta (in
/// units of d) on a centered ULA: sqrt(r^2 + delta^2 d^2 - 2 r delta d sin(theta)).
double element_distance(double r, double theta, double delta, double d);

/// Near-field steering vector, element n = (1/sqrt(N)) exp(-j k_c (r^(n) - r)).
/// Unit L2 norm by construction.
arma::cx_vec steering_vector(double theta, double r, const ArrayGeometry& geom,
                             double k_c);

/// Plane-wave limit of steering_vector for r -> infinity:
/// element n = (1/sqrt(N)) exp(+j k_c delta_n d sin(theta)).
arma::cx_vec far_field_steering_vector(double theta, const ArrayGeometry& geom,
                                       double k_c);

/// Fresnel diffraction parameter nu = theta_edge * sqrt(2 / (lambda (1/d1 + 1/d2))).
double fresnel_nu(double theta_edge, double lambda, double d1, double d2);

/// Single knife-edge loss J(nu) in dB: 6.9 + 20 log10(sqrt((nu-0.1)^2 + 1) + nu - 0.1)
/// for nu > -0.78, clamped to >= 0; zero loss at or below the validity bound.
double knife_edge_loss_db(double nu);

/// Linear amplitude gain 10^(-J(nu)/20), in (0, 1].
double knife_edge_gain(double nu);

/// Per-antenna visibility mask of one path at subcarrier wavelength lambda_m.
/// Stationary: all ones. Binary: ones on the 1-based interval
/// [round(lo), round(hi)]. Non-binary: knife-edge gains from the per-element
/// edge deviation theta_edge - (delta_n d cos(theta)) / r with d1 = d2 = r.
arma::vec vr_mask(const Path& path, const ArrayGeometry& geom, double lambda_m);

/// Symmetric subcarrier grid f_m = f_c + (m - (M+1)/2) B/M, m = 1..M,
/// returned as wavenumbers k_m = 2 pi f_m / c.
std::vector<double> subcarrier_wavenumbers(double carrier_hz, double bandwidth_hz,
                                           int n_subcarriers);

/// Channel synthesis: column m = sqrt(N/L) sum_l g_l exp(-j k_m r_l)
/// b(theta_l, r_l) .* s_{m,l}.
ChannelTensor synthesize_channel(const PathSet& pathset, const ArrayGeometry& geom);

/// Noisy stacked pilot observation. Noise is i.i.d. circular complex Gaussian
/// with per-entry variance sigma^2 = ||H||_F^2 / (N M 10^(snr/10)); pass
/// snr_db = +infinity to disable noise. A zero channel with finite SNR is an
/// error (the normalization is undefined).
PilotObservation observe_pilots(const ChannelTensor& channel, double snr_db,
                                int n_pilots, Rng& rng);

/// Draws one random scenario (paths + channel) from the configured ranges.
Scenario sample_scenario(const ScenarioParams& params, Rng& rng);

}  // namespace elaasim
