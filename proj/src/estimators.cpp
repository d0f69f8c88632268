// SPDX-License-Identifier: Apache-2.0

#include "elaasim/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace elaasim {

namespace {
constexpr double kProjectionRelTol = 1e-10;

void check_observation(const PilotObservation& obs) {
  if (obs.n_antennas < 1 || obs.n_pilots < 1 ||
      obs.stacked.n_rows != static_cast<arma::uword>(obs.n_antennas) *
                                static_cast<arma::uword>(obs.n_pilots) ||
      obs.stacked.n_cols == 0) {
    throw std::invalid_argument("estimator: malformed pilot observation");
  }
}

/// Steps shared by the VR-aided estimators once an atom has been chosen:
/// project, score the unmasked contribution against the previous residual,
/// decode the VR mask, re-project with the masked atom, update the residual.
void vr_step(const arma::cx_mat& y, arma::cx_mat& residual, SupportSet& sup,
             arma::cx_mat& coeffs, std::vector<arma::uvec>& vr_masks,
             std::vector<std::string>& notes, const arma::cx_vec& atom,
             int n_antennas, int n_pilots, const HmmParams& hmm) {
  sup.masked_atoms.insert_cols(sup.masked_atoms.n_cols, atom);
  coeffs = orthogonal_project(sup.masked_atoms, y, &notes);

  const arma::cx_mat contribution = atom * coeffs.row(coeffs.n_rows - 1);
  const arma::cx_mat interim = residual - contribution;
  const VrObservation obs = compute_observation(
      residual, interim, n_antennas, n_pilots, static_cast<int>(y.n_cols));

  arma::vec log_p_in, log_p_out;
  emission_log_probs(obs, hmm.temperature, log_p_in, log_p_out);
  arma::uvec mask = viterbi_log(log_p_in, log_p_out, hmm);
  if (arma::accu(mask) == 0) {
    mask.ones();
    notes.push_back("path " + std::to_string(vr_masks.size()) +
                    ": all-zero VR mask decoded, kept the unmasked atom");
  }
  vr_masks.push_back(mask);

  const arma::vec repeated = arma::repmat(arma::conv_to<arma::vec>::from(mask),
                                          static_cast<arma::uword>(n_pilots), 1);
  const arma::cx_vec masked(arma::real(atom) % repeated, arma::imag(atom) % repeated);
  sup.masked_atoms.col(sup.masked_atoms.n_cols - 1) = masked;

  coeffs = orthogonal_project(sup.masked_atoms, y, &notes);
  residual = y - sup.masked_atoms * coeffs;
}
}  // namespace

EstimateReport ls_estimate(const PilotObservation& obs) {
  check_observation(obs);
  const arma::uword n = static_cast<arma::uword>(obs.n_antennas);

  EstimateReport report;
  report.channel_estimate.zeros(n, obs.stacked.n_cols);
  for (int t = 0; t < obs.n_pilots; ++t) {
    report.channel_estimate += obs.stacked.rows(t * n, (t + 1) * n - 1);
  }
  report.channel_estimate /= static_cast<double>(obs.n_pilots);
  return report;
}

SompSelection somp_select(const arma::cx_mat& w_stacked, const arma::cx_mat& residual) {
  return somp_select(w_stacked, residual, {});
}

SompSelection somp_select(const arma::cx_mat& w_stacked, const arma::cx_mat& residual,
                          const std::vector<arma::uword>& excluded) {
  if (w_stacked.n_rows != residual.n_rows || w_stacked.n_cols == 0) {
    throw std::invalid_argument("somp_select: shape mismatch");
  }
  if (excluded.size() >= w_stacked.n_cols) {
    throw std::invalid_argument("somp_select: no selectable atoms left");
  }
  std::vector<char> barred(w_stacked.n_cols, 0);
  for (const arma::uword p : excluded) barred[p] = 1;

  const arma::cx_mat gamma = w_stacked.t() * residual;
  const arma::vec scores = arma::sum(arma::square(arma::abs(gamma)), 1);

  SompSelection sel;
  bool found = false;
  for (arma::uword p = 0; p < scores.n_elem; ++p) {
    if (barred[p]) continue;
    if (!found || scores(p) > sel.score) {
      sel.index = p;
      sel.score = scores(p);
      found = true;
    }
  }
  sel.degenerate = (sel.score == 0.0);
  return sel;
}

arma::cx_mat orthogonal_project(const arma::cx_mat& basis, const arma::cx_mat& y,
                                std::vector<std::string>* notes) {
  if (basis.n_cols == 0 || basis.n_rows != y.n_rows) {
    throw std::invalid_argument("orthogonal_project: shape mismatch");
  }

  std::vector<arma::uword> keep;
  keep.reserve(basis.n_cols);
  for (arma::uword c = 0; c < basis.n_cols; ++c) {
    if (arma::norm(basis.col(c)) > 0.0) {
      keep.push_back(c);
    } else if (notes) {
      notes->push_back("projection: zero atom column " + std::to_string(c) + " excluded");
    }
  }

  arma::cx_mat coeffs(basis.n_cols, y.n_cols, arma::fill::zeros);
  if (keep.empty()) return coeffs;

  const arma::cx_mat active = basis.cols(arma::uvec(keep));
  arma::cx_mat u, v;
  arma::vec s;
  if (!arma::svd_econ(u, s, v, active)) {
    throw std::runtime_error("orthogonal_project: SVD failed to converge");
  }
  const double tol = kProjectionRelTol * s.max();
  arma::vec inv_s(s.n_elem, arma::fill::zeros);
  arma::uword dropped = 0;
  for (arma::uword i = 0; i < s.n_elem; ++i) {
    if (s(i) > tol) {
      inv_s(i) = 1.0 / s(i);
    } else {
      ++dropped;
    }
  }
  if (dropped > 0 && notes) {
    notes->push_back("projection: " + std::to_string(dropped) +
                     " singular value(s) below tolerance zeroed");
  }

  const arma::cx_mat solved = v * (arma::diagmat(inv_s) * (u.t() * y));
  for (std::size_t i = 0; i < keep.size(); ++i) coeffs.row(keep[i]) = solved.row(i);
  return coeffs;
}

EstimateReport p_somp(const PilotObservation& obs, const PolarDictionary& dict, int l_hat) {
  check_observation(obs);
  if (dict.size() == 0 || dict.atoms.n_rows != static_cast<arma::uword>(obs.n_antennas)) {
    throw std::invalid_argument("p_somp: dictionary does not match the array");
  }
  if (l_hat < 1) throw std::invalid_argument("p_somp: need at least one iteration");

  EstimateReport report;
  int iters = l_hat;
  if (static_cast<arma::uword>(iters) > dict.size()) {
    iters = static_cast<int>(dict.size());
    report.notes.push_back("support budget clamped to the dictionary size");
  }

  const arma::cx_mat w = stack_for_pilots(dict, obs.n_pilots);
  const arma::cx_mat& y = obs.stacked;
  arma::cx_mat residual = y;
  arma::cx_mat coeffs;
  SupportSet sup;
  sup.masked_atoms.set_size(y.n_rows, 0);

  for (int l = 0; l < iters; ++l) {
    const SompSelection sel = somp_select(w, residual, sup.indices);
    if (sel.degenerate) {
      report.notes.push_back("degenerate selection (all correlations zero) at path " +
                             std::to_string(l));
    }
    sup.indices.push_back(sel.index);
    sup.masked_atoms.insert_cols(sup.masked_atoms.n_cols, w.col(sel.index));
    coeffs = orthogonal_project(sup.masked_atoms, y, &report.notes);
    residual = y - sup.masked_atoms * coeffs;
  }

  report.sparse_coefficients = coeffs;
  report.channel_estimate =
      sup.masked_atoms.rows(0, static_cast<arma::uword>(obs.n_antennas) - 1) * coeffs;
  report.supports = std::move(sup);
  return report;
}

EstimateReport vr_hmm_p_somp(const PilotObservation& obs, const PolarDictionary& dict,
                             int l_hat, const HmmParams& hmm,
                             const VrSompOptions& options) {
  check_observation(obs);
  hmm.validate();
  if (dict.size() == 0 || dict.atoms.n_rows != static_cast<arma::uword>(obs.n_antennas)) {
    throw std::invalid_argument("vr_hmm_p_somp: dictionary does not match the array");
  }
  if (l_hat < 1) throw std::invalid_argument("vr_hmm_p_somp: need at least one iteration");

  EstimateReport report;
  int iters = l_hat;
  if (static_cast<arma::uword>(iters) > dict.size()) {
    iters = static_cast<int>(dict.size());
    report.notes.push_back("support budget clamped to the dictionary size");
  }

  arma::cx_mat w_sel = stack_for_pilots(dict, obs.n_pilots);
  const arma::cx_mat& y = obs.stacked;
  const double y_norm = arma::norm(y, "fro");
  arma::cx_mat residual = y;
  arma::cx_mat coeffs;
  SupportSet sup;
  sup.masked_atoms.set_size(y.n_rows, 0);

  for (int l = 0; l < iters; ++l) {
    if (options.residual_stop > 0.0 && l > 0 &&
        arma::norm(residual, "fro") <= options.residual_stop * y_norm) {
      report.notes.push_back("residual threshold reached after " + std::to_string(l) +
                             " path(s)");
      break;
    }
    const SompSelection sel = somp_select(w_sel, residual, sup.indices);
    if (sel.degenerate) {
      report.notes.push_back("degenerate selection (all correlations zero) at path " +
                             std::to_string(l));
    }
    sup.indices.push_back(sel.index);
    vr_step(y, residual, sup, coeffs, report.vr_masks, report.notes,
            arma::cx_vec(w_sel.col(sel.index)), obs.n_antennas, obs.n_pilots, hmm);
    if (options.mask_selection_dictionary) {
      w_sel.col(sel.index) = sup.masked_atoms.col(sup.masked_atoms.n_cols - 1);
    }
  }

  report.sparse_coefficients = coeffs;
  report.channel_estimate =
      sup.masked_atoms.rows(0, static_cast<arma::uword>(obs.n_antennas) - 1) * coeffs;
  report.supports = std::move(sup);
  return report;
}

EstimateReport subarray_p_somp(const PilotObservation& obs, const ArrayGeometry& geom,
                               double k_c, int n_subarrays, int l_hat,
                               const DictGridSpec& grid) {
  check_observation(obs);
  if (geom.n_antennas != obs.n_antennas) {
    throw std::invalid_argument("subarray_p_somp: geometry does not match the observation");
  }
  if (n_subarrays < 1 || geom.n_antennas % n_subarrays != 0) {
    throw std::invalid_argument("subarray_p_somp: antenna count not divisible by subarrays");
  }

  const int n_sub = geom.n_antennas / n_subarrays;
  const arma::uword n_sub_u = static_cast<arma::uword>(n_sub);
  const arma::uword n_full = static_cast<arma::uword>(geom.n_antennas);
  const arma::uword n_pilots = static_cast<arma::uword>(obs.n_pilots);

  const ArrayGeometry sub_geom(n_sub, geom.spacing);
  DictGridSpec sub_grid = grid;
  sub_grid.atom_override = 0;
  const PolarDictionary sub_dict = build_dictionary(sub_geom, k_c, sub_grid);

  EstimateReport report;
  report.channel_estimate.zeros(n_full, obs.stacked.n_cols);
  report.sparse_coefficients.set_size(0, obs.stacked.n_cols);
  report.supports.masked_atoms.set_size(obs.stacked.n_rows, 0);

  for (int k = 0; k < n_subarrays; ++k) {
    PilotObservation sub_obs;
    sub_obs.n_antennas = n_sub;
    sub_obs.n_pilots = obs.n_pilots;
    sub_obs.noise_variance = obs.noise_variance;
    sub_obs.stacked.set_size(n_sub_u * n_pilots, obs.stacked.n_cols);
    for (arma::uword t = 0; t < n_pilots; ++t) {
      sub_obs.stacked.rows(t * n_sub_u, (t + 1) * n_sub_u - 1) = obs.stacked.rows(
          t * n_full + static_cast<arma::uword>(k) * n_sub_u,
          t * n_full + (static_cast<arma::uword>(k) + 1) * n_sub_u - 1);
    }

    EstimateReport block = p_somp(sub_obs, sub_dict, l_hat);
    report.channel_estimate.rows(static_cast<arma::uword>(k) * n_sub_u,
                                 (static_cast<arma::uword>(k) + 1) * n_sub_u - 1) =
        block.channel_estimate;
    for (const std::string& note : block.notes) {
      report.notes.push_back("subarray " + std::to_string(k) + ": " + note);
    }

    const arma::uword first_new = report.supports.masked_atoms.n_cols;
    for (std::size_t c = 0; c < block.supports.indices.size(); ++c) {
      report.supports.indices.push_back(static_cast<arma::uword>(k) * sub_dict.size() +
                                        block.supports.indices[c]);
      arma::cx_vec embedded(obs.stacked.n_rows, arma::fill::zeros);
      for (arma::uword t = 0; t < n_pilots; ++t) {
        embedded.subvec(t * n_full + static_cast<arma::uword>(k) * n_sub_u,
                        t * n_full + (static_cast<arma::uword>(k) + 1) * n_sub_u - 1) =
            block.supports.masked_atoms.col(c).subvec(t * n_sub_u, (t + 1) * n_sub_u - 1);
      }
      report.supports.masked_atoms.insert_cols(first_new + c, embedded);
    }
    report.sparse_coefficients.insert_rows(report.sparse_coefficients.n_rows,
                                           block.sparse_coefficients);
  }
  return report;
}

EstimateReport genie_vr_hmm_p_somp(const PilotObservation& obs, const PathSet& true_paths,
                                   const ArrayGeometry& geom, int n_paths,
                                   const HmmParams& hmm) {
  check_observation(obs);
  hmm.validate();
  if (true_paths.paths.empty()) {
    throw std::invalid_argument("genie_vr_hmm_p_somp: no true paths given");
  }
  if (n_paths < 1 || static_cast<std::size_t>(n_paths) > true_paths.paths.size()) {
    throw std::invalid_argument("genie_vr_hmm_p_somp: path count out of range");
  }
  if (geom.n_antennas != obs.n_antennas) {
    throw std::invalid_argument("genie_vr_hmm_p_somp: geometry does not match the observation");
  }

  std::vector<arma::uword> order(true_paths.paths.size());
  std::iota(order.begin(), order.end(), arma::uword{0});
  std::stable_sort(order.begin(), order.end(), [&true_paths](arma::uword a, arma::uword b) {
    return std::abs(true_paths.paths[a].gain) > std::abs(true_paths.paths[b].gain);
  });

  EstimateReport report;
  const arma::cx_mat& y = obs.stacked;
  arma::cx_mat residual = y;
  arma::cx_mat coeffs;
  SupportSet sup;
  sup.masked_atoms.set_size(y.n_rows, 0);

  for (int l = 0; l < n_paths; ++l) {
    const Path& path = true_paths.paths[order[static_cast<std::size_t>(l)]];
    const arma::cx_vec atom = arma::repmat(
        steering_vector(path.angle, path.distance, geom, true_paths.carrier_wavenumber),
        static_cast<arma::uword>(obs.n_pilots), 1);
    sup.indices.push_back(order[static_cast<std::size_t>(l)]);
    vr_step(y, residual, sup, coeffs, report.vr_masks, report.notes, atom,
            obs.n_antennas, obs.n_pilots, hmm);
  }

  report.sparse_coefficients = coeffs;
  report.channel_estimate =
      sup.masked_atoms.rows(0, static_cast<arma::uword>(obs.n_antennas) - 1) * coeffs;
  report.supports = std::move(sup);
  return report;
}

}  // namespace elaasim
