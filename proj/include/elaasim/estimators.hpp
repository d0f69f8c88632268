// SPDX-License-Identifier: Apache-2.0
//
// Channel estimators: least squares, polar-domain SOMP, its subarray
// variant, the VR-HMM-aided SOMP, and a genie-aided reference.

#pragma once

#include <armadillo>
#include <string>
#include <vector>

#include "elaasim/geometry.hpp"
#include "elaasim/polar_dictionary.hpp"
#include "elaasim/vr_hmm.hpp"

namespace elaasim {

struct SupportSet {
  std::vector<arma::uword> indices;
  arma::cx_mat masked_atoms;  // (N*T) x |indices|, after any VR masking
};

struct EstimateReport {
  arma::cx_mat channel_estimate;     // N x M
  arma::cx_mat sparse_coefficients;  // |indices| x M
  SupportSet supports;
  std::vector<arma::uvec> vr_masks;  // one per selected path; empty for non-VR estimators
  std::vector<std::string> notes;
};

struct SompSelection {
  arma::uword index = 0;
  double score = 0.0;
  bool degenerate = false;  // every candidate scored zero
};

struct VrSompOptions {
  /// >0 stops early once ||R||_F <= residual_stop * ||Y||_F. Off by default;
  /// the reference evaluation always runs the fixed iteration count.
  double residual_stop = 0.0;
  /// Also write masked atoms back into the selection dictionary. Off by
  /// default: masking the correlation dictionary biases later selections.
  bool mask_selection_dictionary = false;
};

/// Block average of the T pilot repetitions (the LS solution for unit pilots).
EstimateReport ls_estimate(const PilotObservation& obs);

/// argmax_p sum_m |(W^H R)_{p,m}|^2, lowest index on ties. The overload
/// skips already-selected indices.
SompSelection somp_select(const arma::cx_mat& w_stacked, const arma::cx_mat& residual);
SompSelection somp_select(const arma::cx_mat& w_stacked, const arma::cx_mat& residual,
                          const std::vector<arma::uword>& excluded);

/// Per-column least squares min ||y - basis x||_F via SVD with relative
/// singular-value tolerance 1e-10. All-zero basis columns are excluded from
/// the solve and get zero coefficients (a note records the event).
arma::cx_mat orthogonal_project(const arma::cx_mat& basis, const arma::cx_mat& y,
                                std::vector<std::string>* notes = nullptr);

EstimateReport p_somp(const PilotObservation& obs, const PolarDictionary& dict, int l_hat);

EstimateReport vr_hmm_p_somp(const PilotObservation& obs, const PolarDictionary& dict,
                             int l_hat, const HmmParams& hmm,
                             const VrSompOptions& options = {});

/// Contiguous antenna blocks, one independent p_somp per block on its own
/// scaled-down dictionary. Reported supports use global column indices
/// (block * block_dictionary_size + local).
EstimateReport subarray_p_somp(const PilotObservation& obs, const ArrayGeometry& geom,
                               double k_c, int n_subarrays, int l_hat,
                               const DictGridSpec& grid);

/// VR-HMM-P-SOMP with selection replaced by the exact steering vectors of
/// the first n_paths true paths (descending |gain|); VR estimation still runs.
EstimateReport genie_vr_hmm_p_somp(const PilotObservation& obs, const PathSet& true_paths,
                                   const ArrayGeometry& geom, int n_paths,
                                   const HmmParams& hmm);

}  // namespace elaasim
