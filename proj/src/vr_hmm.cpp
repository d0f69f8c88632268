// SPDX-License-Identifier: Apache-2.0

#include "elaasim/vr_hmm.hpp"

#include <cmath>
#include <stdexcept>

namespace elaasim {

namespace {
double softplus(double x) {
  // log(1 + e^x) without overflow for large |x|
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double log_sigmoid(double x) { return -softplus(-x); }

bool valid_prob(double p) { return p > 0.0 && p < 1.0; }
}  // namespace

HmmParams HmmParams::defaults(int n_antennas) {
  if (n_antennas < 2) throw std::invalid_argument("HmmParams: need at least 2 antennas");
  HmmParams p;
  p.p_switch = 1.0 / n_antennas;
  p.p_stay = 1.0 - p.p_switch;
  return p;
}

void HmmParams::validate() const {
  if (!valid_prob(p_stay) || !valid_prob(p_switch) ||
      std::abs(p_stay + p_switch - 1.0) > 1e-12) {
    throw std::invalid_argument("HmmParams: transition probabilities must sum to 1");
  }
  if (!valid_prob(p_init_in) || !valid_prob(p_init_out) ||
      std::abs(p_init_in + p_init_out - 1.0) > 1e-12) {
    throw std::invalid_argument("HmmParams: initial probabilities must sum to 1");
  }
  if (!(temperature > 0.0)) throw std::invalid_argument("HmmParams: temperature must be > 0");
}

arma::cx_mat reshape_antenna_major(const arma::cx_mat& stacked, int n_antennas) {
  if (n_antennas < 1 || stacked.n_rows % static_cast<arma::uword>(n_antennas) != 0) {
    throw std::invalid_argument("reshape_antenna_major: row count not divisible by N");
  }
  const arma::uword n = static_cast<arma::uword>(n_antennas);
  const arma::uword n_pilots = stacked.n_rows / n;
  const arma::uword m = stacked.n_cols;
  arma::cx_mat out(n, n_pilots * m);
  for (arma::uword t = 0; t < n_pilots; ++t) {
    for (arma::uword col = 0; col < m; ++col) {
      out.col(t * m + col) = stacked.col(col).subvec(t * n, (t + 1) * n - 1);
    }
  }
  return out;
}

VrObservation compute_observation(const arma::cx_mat& residual,
                                  const arma::cx_mat& interim_residual,
                                  int n_antennas, int n_pilots, int n_subcarriers) {
  const arma::uword rows = static_cast<arma::uword>(n_antennas) *
                           static_cast<arma::uword>(n_pilots);
  if (n_antennas < 1 || n_pilots < 1 || n_subcarriers < 1 ||
      residual.n_rows != rows || residual.n_cols != static_cast<arma::uword>(n_subcarriers) ||
      arma::size(residual) != arma::size(interim_residual)) {
    throw std::invalid_argument("compute_observation: shape mismatch");
  }
  const arma::mat drop = arma::abs(residual) - arma::abs(interim_residual);

  VrObservation obs;
  obs.n_pilots = n_pilots;
  obs.n_subcarriers = n_subcarriers;
  obs.values.zeros(static_cast<arma::uword>(n_antennas));
  for (arma::uword t = 0; t < static_cast<arma::uword>(n_pilots); ++t) {
    for (arma::uword n = 0; n < static_cast<arma::uword>(n_antennas); ++n) {
      obs.values(n) += arma::accu(drop.row(t * n_antennas + n));
    }
  }
  obs.values /= static_cast<double>(n_pilots) * n_subcarriers;
  return obs;
}

void emission_probs(const VrObservation& obs, double temperature,
                    arma::vec& p_in, arma::vec& p_out) {
  if (!(temperature > 0.0)) throw std::invalid_argument("emission_probs: temperature must be > 0");
  p_in.set_size(obs.values.n_elem);
  for (arma::uword n = 0; n < obs.values.n_elem; ++n) {
    p_in(n) = 1.0 / (1.0 + std::exp(-temperature * obs.values(n)));
  }
  p_out = 1.0 - p_in;
}

void emission_log_probs(const VrObservation& obs, double temperature,
                        arma::vec& log_p_in, arma::vec& log_p_out) {
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("emission_log_probs: temperature must be > 0");
  }
  log_p_in.set_size(obs.values.n_elem);
  log_p_out.set_size(obs.values.n_elem);
  for (arma::uword n = 0; n < obs.values.n_elem; ++n) {
    log_p_in(n) = log_sigmoid(temperature * obs.values(n));
    log_p_out(n) = log_sigmoid(-temperature * obs.values(n));
  }
}

arma::uvec viterbi(const arma::vec& p_in, const arma::vec& p_out,
                   const HmmParams& params) {
  if (p_in.n_elem != p_out.n_elem) throw std::invalid_argument("viterbi: emission length mismatch");
  for (arma::uword n = 0; n < p_in.n_elem; ++n) {
    if (!(p_in(n) > 0.0) || !(p_out(n) > 0.0) ||
        !std::isfinite(p_in(n)) || !std::isfinite(p_out(n))) {
      throw std::invalid_argument("viterbi: emissions must be finite and positive");
    }
  }
  return viterbi_log(arma::log(p_in), arma::log(p_out), params);
}

arma::uvec viterbi_log(const arma::vec& log_p_in, const arma::vec& log_p_out,
                       const HmmParams& params) {
  params.validate();
  const arma::uword n = log_p_in.n_elem;
  if (n == 0 || log_p_out.n_elem != n) {
    throw std::invalid_argument("viterbi_log: emission length mismatch");
  }

  const double lt_stay = std::log(params.p_stay);
  const double lt_switch = std::log(params.p_switch);

  // state 0 = in VR, state 1 = outside; ties prefer state 0
  arma::vec score = {std::log(params.p_init_in) + log_p_in(0),
                     std::log(params.p_init_out) + log_p_out(0)};
  arma::umat back(2, n, arma::fill::zeros);
  for (arma::uword k = 1; k < n; ++k) {
    arma::vec next(2);
    for (arma::uword s = 0; s < 2; ++s) {
      const double from_in = score(0) + (s == 0 ? lt_stay : lt_switch);
      const double from_out = score(1) + (s == 1 ? lt_stay : lt_switch);
      const arma::uword prev = (from_in >= from_out) ? 0 : 1;
      back(s, k) = prev;
      next(s) = (prev == 0 ? from_in : from_out) + (s == 0 ? log_p_in(k) : log_p_out(k));
    }
    score = next;
  }

  arma::uvec mask(n);
  arma::uword state = (score(0) >= score(1)) ? 0 : 1;
  mask(n - 1) = (state == 0) ? 1 : 0;
  for (arma::uword k = n - 1; k > 0; --k) {
    state = back(state, k);
    mask(k - 1) = (state == 0) ? 1 : 0;
  }
  return mask;
}

}  // namespace elaasim
