#pragma once

#include "pnest/config.hpp"
#include "pnest/modem.hpp"
#include "pnest/rng.hpp"
#include "pnest/types.hpp"

#include <nlohmann/json.hpp>

namespace pnest {

/// Ground truth for one frame. Phase matrices have one column per frame
/// column (CP included); beta uses the last transmit oscillator as reference.
struct ChannelRealization {
  CMatrix h;     ///< n_r x n_t
  RMatrix phi;   ///< n_r x l_f
  RMatrix psi;   ///< n_t x l_f
  RMatrix beta;  ///< (n_r + n_t - 1) x l_f

  /// Phi_m H Psi_m for frame column `col`.
  CMatrix equivalent_channel(int col) const;
};

struct TransmitFrame {
  CMatrix s;                ///< n_t x l_f, pilots and data (CP columns repeat the tail)
  std::vector<int> data_m;  ///< symbol indices (1-based) carrying data, ascending
  Bits bits;                ///< label bits: data symbol major, antenna, then MSB-first
};

struct ReceivedFrame {
  CMatrix y;  ///< n_r x l_f
  CMatrix s;  ///< n_t x l_f
};

CMatrix sample_channel(int n_r, int n_t, RandomStream& rng);

struct PhaseWalks {
  RMatrix phi;
  RMatrix psi;
  RMatrix beta;
};

PhaseWalks sample_phase_walks(const SystemConfig& config, const FramePlan& plan,
                              RandomStream& rng);

/// beta rows 1..n_r = phi + psi[n_t]; rows n_r+1.. = psi[q - n_r] - psi[n_t].
RMatrix compose_beta(const RMatrix& phi, const RMatrix& psi);

TransmitFrame make_transmit_frame(const SystemConfig& config, const FramePlan& plan,
                                  RandomStream& data_rng);

/// y[:,m] = Phi_m H Psi_m s[:,m] + n[:,m]. Passing a null noise stream
/// disables noise injection.
ReceivedFrame transmit(const CMatrix& h, const RMatrix& phi, const RMatrix& psi,
                       const CMatrix& s_frame, double sigma_n_sq, RandomStream* noise_rng);

nlohmann::json to_json(const ChannelRealization& r);
ChannelRealization channel_realization_from_json(const nlohmann::json& j);

}  // namespace pnest
