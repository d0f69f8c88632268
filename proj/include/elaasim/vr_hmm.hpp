// SPDX-License-Identifier: Apache-2.0
//
// Two-state hidden Markov model along the antenna axis. Residual-magnitude
// drops become per-antenna observations, sigmoid emissions, and a Viterbi
// decode that yields a binary visibility-region mask.

#pragma once

#include <armadillo>

namespace elaasim {

struct HmmParams {
  double p_stay = 0.0;
  double p_switch = 0.0;
  double p_init_in = 0.55;
  double p_init_out = 0.45;
  double temperature = 20.0;

  /// p_stay = 1 - 1/N, p_switch = 1/N; remaining fields keep their defaults.
  static HmmParams defaults(int n_antennas);

  /// Throws std::invalid_argument unless both pairs sum to 1 and 𝒯 > 0.
  void validate() const;
};

struct VrObservation {
  arma::vec values;  // length N
  int n_pilots = 0;
  int n_subcarriers = 0;
};

/// Rearranges the stacked (N·T) x M matrix so row n holds every measurement
/// of antenna n: out(n, t·M + m) = in(t·N + n, m).
arma::cx_mat reshape_antenna_major(const arma::cx_mat& stacked, int n_antennas);

/// o_n = mean over all T·M measurements of |R| - |R_pi| at antenna n.
/// Positive where removing the candidate path lowered the residual.
VrObservation compute_observation(const arma::cx_mat& residual,
                                  const arma::cx_mat& interim_residual,
                                  int n_antennas, int n_pilots, int n_subcarriers);

/// p_in = sigma(𝒯·o), p_out = sigma(-𝒯·o); each pair sums to 1 exactly.
void emission_probs(const VrObservation& obs, double temperature,
                    arma::vec& p_in, arma::vec& p_out);

/// log sigma via the softplus identity, stable for |𝒯·o| in the hundreds.
void emission_log_probs(const VrObservation& obs, double temperature,
                        arma::vec& log_p_in, arma::vec& log_p_out);

/// Maximum-likelihood binary state sequence (1 = in VR). Emissions are
/// treated as unnormalized positive likelihood weights.
arma::uvec viterbi(const arma::vec& p_in, const arma::vec& p_out,
                   const HmmParams& params);

/// Same decode from log-domain emissions.
arma::uvec viterbi_log(const arma::vec& log_p_in, const arma::vec& log_p_out,
                       const HmmParams& params);

}  // namespace elaasim
