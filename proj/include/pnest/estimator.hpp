#pragma once

#include "pnest/config.hpp"
#include "pnest/types.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <vector>

namespace pnest {

/// Per-pilot-group LS estimate and its element-wise angle on [-pi, pi).
struct GroupObservation {
  CMatrix h_hat;  ///< n_r x n_t
  RMatrix a;      ///< n_r x n_t
};

GroupObservation per_group_ls(const CMatrix& y_block, const PilotBlock& pilot);

/// Mean over groups of |H_i|^2 minus the per-entry LS noise variance sigma_n^2 / n_t.
RMatrix amplitude_sq_aggregate(std::span<const GroupObservation> groups, double sigma_n_sq);
RMatrix amplitude_finalize(const RMatrix& amp_sq);

struct OnlineState {
  RMatrix amp_sq;
  CMatrix h_run;
  double k_factor = 1.0;
  int amp_updates = 0;
  int h_updates = 0;
};

/// amp_sq <- (1 - K) amp_sq + K (|H_i|^2 - sigma_n^2 / n_t). The first update
/// loads the observation directly.
OnlineState amplitude_sq_online(OnlineState state, const GroupObservation& group,
                                double sigma_n_sq);
/// h_run <- (1 - K) h_run + K H_i, seeded by the first estimate.
OnlineState average_channel_online(OnlineState state, const CMatrix& group_estimate,
                                   double k_factor);

RVector unwrap_sequence(const RVector& angles);

/// Selection matrix for alpha stacked column-major (row l * n_r + k):
/// alpha_{k,l} = beta_k + beta_{n_r + l} for l < n_t - 1, beta_k for l = n_t - 1.
RMatrix build_c_matrix(int n_r, int n_t);

struct WllsSystem {
  RMatrix c;
  RMatrix c_weighted;
  RMatrix pinv_c_weighted;
  RVector weights;      ///< vec(amp), column-major
  RVector noise_var;    ///< per-row one-shot noise variance
  RVector process_var;  ///< per-row inter-group walk variance
};

/// Builds C' = diag(vec(amp)) C and its SVD pseudo-inverse.
/// Throws Error{RankDeficientWeights} below full column rank.
WllsSystem make_wlls_system(const RMatrix& amp, int n_r, int n_t);

RVector wlls_noise_variance(const WllsSystem& system, double sigma_n_sq, int n_t);
RVector inter_group_process_variance(const SystemConfig& config, const FramePlan& plan);

/// One column per group: beta_hat_i = pinv(C') (w .* vec(unwrapped A_i)).
RMatrix wlls_solve(std::span<const GroupObservation> groups, const WllsSystem& system);

/// Random-walk autocovariance relative to the window center, (2 l_w + 1)^2.
RMatrix wiener_process_cov(int l_w, double process_var);

/// omega = K^-1 1 / (1^T K^-1 1), K = K_p + noise_var I. Throws Error{SingularK}.
RVector wiener_coefficients(int l_w, double process_var, double noise_var);

enum class BoundaryPolicy { Renormalize, HoldEdge };

struct WienerFilter {
  int l_w = 0;
  std::vector<RVector> taps;  ///< one tap vector per beta row
};

WienerFilter make_wiener_filter(int l_w, const RVector& process_var, const RVector& noise_var);

RMatrix wiener_smooth(const RMatrix& beta_hat, const WienerFilter& filter,
                      BoundaryPolicy boundary = BoundaryPolicy::Renormalize);

/// diag(e^{-j beta_rx}) (Y S^H / n_t) diag(e^{-j beta_tx}, 1).
CMatrix recover_group_channel(const CMatrix& y_block, const PilotBlock& pilot,
                              const RVector& beta_col);

CMatrix average_channel(std::span<const CMatrix> recovered);

/// Per-column phases (l_f columns). Linear between group reference symbols,
/// held flat outside [m_1, m_Nc].
RMatrix interpolate_beta(const RMatrix& beta_smooth, const FramePlan& plan);

/// diag(e^{j beta_rx}) H diag(e^{j beta_tx}, 1).
CMatrix compose_equivalent_channel(const RVector& beta_col, const CMatrix& h_hat);

struct EstimatorOptions {
  BoundaryPolicy boundary = BoundaryPolicy::Renormalize;
  bool online = false;
  double k_factor = 0.0;  ///< 0 selects 2 / (n_c + 1)
};

struct EstimateBundle {
  RMatrix amp;
  RMatrix beta_hat;     ///< (n_r + n_t - 1) x n_c
  RMatrix beta_smooth;  ///< (n_r + n_t - 1) x n_c
  CMatrix h_hat;
  RMatrix beta_interp;  ///< (n_r + n_t - 1) x l_f
  RVector noise_var;
  RVector process_var;

  CMatrix equivalent_channel(int col) const {
    return compose_equivalent_channel(beta_interp.col(col), h_hat);
  }
};

/// Pilot block of group i (0-based) cut out of an n_r x l_f frame.
CMatrix group_block(const CMatrix& y_frame, const FramePlan& plan, int i);

EstimateBundle estimate_frame(const CMatrix& y_frame, const FramePlan& plan,
                              const SystemConfig& config, const EstimatorOptions& options = {});

nlohmann::json to_json(const EstimateBundle& b);
EstimateBundle estimate_bundle_from_json(const nlohmann::json& j);

}  // namespace pnest
