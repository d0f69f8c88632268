// SPDX-License-Identifier: Apache-2.0

#include "elaasim/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace elaasim {

namespace {
// ITU knife-edge model validity bound; no loss at or below it.
constexpr double kKnifeEdgeNuMin = -0.78;

MaskCase draw_mask_case(const std::array<double, 3>& mix, Rng& rng) {
  const double total = mix[0] + mix[1] + mix[2];
  const double u = rng.uniform() * total;
  if (u < mix[0]) return MaskCase::kStationary;
  if (u < mix[0] + mix[1]) return MaskCase::kBinary;
  return MaskCase::kNonBinary;
}
}  // namespace

ArrayGeometry::ArrayGeometry(int n, double d) : n_antennas(n), spacing(d) {
  if (n < 1) throw std::invalid_argument("ArrayGeometry: need at least one antenna");
  if (!(d > 0.0)) throw std::invalid_argument("ArrayGeometry: spacing must be positive");
  element_offsets.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    element_offsets[static_cast<std::size_t>(i)] = (2.0 * i - n + 1.0) / 2.0;
  }
}

double element_distance(double r, double theta, double delta, double d) {
  if (!(r > 0.0)) throw std::domain_error("element_distance: r must be positive");
  const double off = delta * d;
  // (r - off sin)^2 + (off cos)^2 expanded; never negative.
  return std::sqrt(r * r + off * off - 2.0 * r * off * std::sin(theta));
}

arma::cx_vec steering_vector(double theta, double r, const ArrayGeometry& geom,
                             double k_c) {
  if (!(r > 0.0)) throw std::domain_error("steering_vector: r must be positive");
  const int n = geom.n_antennas;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  arma::cx_vec b(static_cast<arma::uword>(n));
  for (int i = 0; i < n; ++i) {
    const double rn = element_distance(r, theta, geom.element_offsets[static_cast<std::size_t>(i)],
                                       geom.spacing);
    const double phase = -k_c * (rn - r);
    b(static_cast<arma::uword>(i)) = std::polar(scale, phase);
  }
  return b;
}

arma::cx_vec far_field_steering_vector(double theta, const ArrayGeometry& geom,
                                       double k_c) {
  const int n = geom.n_antennas;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double s = std::sin(theta);
  arma::cx_vec b(static_cast<arma::uword>(n));
  for (int i = 0; i < n; ++i) {
    const double phase = k_c * geom.element_offsets[static_cast<std::size_t>(i)] * geom.spacing * s;
    b(static_cast<arma::uword>(i)) = std::polar(scale, phase);
  }
  return b;
}

double fresnel_nu(double theta_edge, double lambda, double d1, double d2) {
  if (!(lambda > 0.0) || !(d1 > 0.0) || !(d2 > 0.0)) {
    throw std::domain_error("fresnel_nu: lambda and distances must be positive");
  }
  return theta_edge * std::sqrt(2.0 / (lambda * (1.0 / d1 + 1.0 / d2)));
}

double knife_edge_loss_db(double nu) {
  if (nu <= kKnifeEdgeNuMin) return 0.0;
  const double u = nu - 0.1;
  const double j = 6.9 + 20.0 * std::log10(std::sqrt(u * u + 1.0) + u);
  return j > 0.0 ? j : 0.0;
}

double knife_edge_gain(double nu) {
  return std::pow(10.0, -knife_edge_loss_db(nu) / 20.0);
}

arma::vec vr_mask(const Path& path, const ArrayGeometry& geom, double lambda_m) {
  const int n = geom.n_antennas;
  arma::vec mask(static_cast<arma::uword>(n), arma::fill::ones);
  switch (path.mask_case) {
    case MaskCase::kStationary:
      break;
    case MaskCase::kBinary: {
      const double lo = std::min(path.vr_lo, path.vr_hi);
      const double hi = std::max(path.vr_lo, path.vr_hi);
      if (lo < 1.0 || hi > n) {
        throw std::invalid_argument("vr_mask: binary endpoints outside [1, N]");
      }
      const long first = std::lround(lo);
      const long last = std::lround(hi);
      for (int i = 0; i < n; ++i) {
        const long pos = i + 1;  // 1-based position along the array
        mask(static_cast<arma::uword>(i)) = (pos >= first && pos <= last) ? 1.0 : 0.0;
      }
      break;
    }
    case MaskCase::kNonBinary: {
      if (!(path.distance > 0.0)) {
        throw std::invalid_argument("vr_mask: non-binary mask needs a positive path distance");
      }
      const double cos_theta = std::cos(path.angle);
      for (int i = 0; i < n; ++i) {
        const double transverse =
            geom.element_offsets[static_cast<std::size_t>(i)] * geom.spacing * cos_theta;
        const double edge_n = path.theta_edge - transverse / path.distance;
        const double nu = fresnel_nu(edge_n, lambda_m, path.distance, path.distance);
        mask(static_cast<arma::uword>(i)) = knife_edge_gain(nu);
      }
      break;
    }
  }
  return mask;
}

std::vector<double> subcarrier_wavenumbers(double carrier_hz, double bandwidth_hz,
                                           int n_subcarriers) {
  if (n_subcarriers < 1) throw std::invalid_argument("subcarrier_wavenumbers: M >= 1");
  std::vector<double> k(static_cast<std::size_t>(n_subcarriers));
  for (int m = 1; m <= n_subcarriers; ++m) {
    const double f = carrier_hz + (m - (n_subcarriers + 1) / 2.0) * bandwidth_hz / n_subcarriers;
    k[static_cast<std::size_t>(m - 1)] = 2.0 * kPi * f / kSpeedOfLight;
  }
  return k;
}

ChannelTensor synthesize_channel(const PathSet& pathset, const ArrayGeometry& geom) {
  const int n = geom.n_antennas;
  const int n_sub = static_cast<int>(pathset.subcarrier_wavenumbers.size());
  const std::size_t n_paths = pathset.paths.size();
  if (n_paths == 0) throw std::invalid_argument("synthesize_channel: empty path set");
  for (std::size_t m = 0; m + 1 < pathset.subcarrier_wavenumbers.size(); ++m) {
    if (!(pathset.subcarrier_wavenumbers[m] < pathset.subcarrier_wavenumbers[m + 1])) {
      throw std::invalid_argument("synthesize_channel: subcarrier wavenumbers must increase");
    }
  }

  ChannelTensor h;
  h.values.zeros(static_cast<arma::uword>(n), static_cast<arma::uword>(n_sub));
  const double scale = std::sqrt(static_cast<double>(n) / static_cast<double>(n_paths));

  for (const Path& path : pathset.paths) {
    const arma::cx_vec b = steering_vector(path.angle, path.distance, geom,
                                           pathset.carrier_wavenumber);
    // Stationary and binary masks do not depend on the subcarrier.
    arma::vec fixed_mask;
    if (path.mask_case != MaskCase::kNonBinary) {
      fixed_mask = vr_mask(path, geom, 2.0 * kPi / pathset.carrier_wavenumber);
    }
    for (int m = 0; m < n_sub; ++m) {
      const double k_m = pathset.subcarrier_wavenumbers[static_cast<std::size_t>(m)];
      const arma::vec mask = (path.mask_case == MaskCase::kNonBinary)
                                 ? vr_mask(path, geom, 2.0 * kPi / k_m)
                                 : fixed_mask;
      const std::complex<double> coeff =
          scale * path.gain * std::polar(1.0, -k_m * path.distance);
      const arma::cx_vec masked_b(arma::real(b) % mask, arma::imag(b) % mask);
      h.values.col(static_cast<arma::uword>(m)) += coeff * masked_b;
    }
  }
  return h;
}

PilotObservation observe_pilots(const ChannelTensor& channel, double snr_db,
                                int n_pilots, Rng& rng) {
  if (n_pilots < 1) throw std::invalid_argument("observe_pilots: need T >= 1 pilot symbols");
  const arma::uword n = channel.values.n_rows;
  const arma::uword n_sub = channel.values.n_cols;

  PilotObservation obs;
  obs.n_antennas = static_cast<int>(n);
  obs.n_pilots = n_pilots;
  obs.stacked.set_size(n * static_cast<arma::uword>(n_pilots), n_sub);

  double sigma2 = 0.0;
  if (std::isfinite(snr_db)) {
    const double power = arma::accu(arma::square(arma::abs(channel.values)));
    if (!(power > 0.0)) {
      throw std::invalid_argument("observe_pilots: zero channel with finite SNR");
    }
    sigma2 = power / (static_cast<double>(n) * static_cast<double>(n_sub) *
                      std::pow(10.0, snr_db / 10.0));
  }
  obs.noise_variance = sigma2;

  const double noise_std = std::sqrt(sigma2 / 2.0);
  for (arma::uword m = 0; m < n_sub; ++m) {
    for (int t = 0; t < n_pilots; ++t) {
      for (arma::uword i = 0; i < n; ++i) {
        std::complex<double> noise{0.0, 0.0};
        if (sigma2 > 0.0) {
          noise = {noise_std * rng.gaussian(), noise_std * rng.gaussian()};
        }
        obs.stacked(static_cast<arma::uword>(t) * n + i, m) = channel.values(i, m) + noise;
      }
    }
  }
  return obs;
}

Scenario sample_scenario(const ScenarioParams& params, Rng& rng) {
  if (params.n_paths < 1) throw std::invalid_argument("sample_scenario: need L >= 1 paths");

  Scenario sc;
  sc.paths.carrier_wavenumber = 2.0 * kPi * params.carrier_hz / kSpeedOfLight;
  sc.paths.subcarrier_wavenumbers =
      subcarrier_wavenumbers(params.carrier_hz, params.bandwidth_hz, params.n_subcarriers);

  sc.paths.paths.reserve(static_cast<std::size_t>(params.n_paths));
  for (int l = 0; l < params.n_paths; ++l) {
    Path p;
    p.distance = rng.uniform(params.r_min, params.r_max);
    p.angle = rng.uniform(params.theta_min, params.theta_max);
    p.gain = rng.complex_unit_disk();
    p.mask_case = draw_mask_case(params.mask_mix, rng);
    switch (p.mask_case) {
      case MaskCase::kStationary:
        break;
      case MaskCase::kBinary:
        p.vr_lo = rng.uniform(1.0, static_cast<double>(params.geom.n_antennas));
        p.vr_hi = rng.uniform(1.0, static_cast<double>(params.geom.n_antennas));
        break;
      case MaskCase::kNonBinary:
        p.theta_edge = rng.uniform(-params.theta_edge_max, params.theta_edge_max);
        break;
    }
    sc.paths.paths.push_back(p);
  }

  sc.channel = synthesize_channel(sc.paths, params.geom);
  return sc;
}

}  // namespace elaasim
