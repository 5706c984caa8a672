#pragma once

#include "pnest/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pnest {

enum class Modulation { BPSK, QPSK, QAM16 };

std::string_view to_string(Modulation m);
Modulation modulation_from_string(std::string_view name);

/// Experiment configuration. Defaults are the 2x2 QPSK reference setup
/// (sigma_delta^2 = 1e-4, pilot rate 0.1, 3000-symbol frames, 101 Wiener taps).
struct SystemConfig {
  int n_t = 2;
  int n_r = 2;
  double sigma_dphi_sq = 1e-4;  ///< receive phase-innovation variance, rad^2
  double sigma_dpsi_sq = 1e-4;  ///< transmit phase-innovation variance, rad^2
  double sigma_n_sq = 1e-2;     ///< complex AWGN variance (1/SNR)
  Modulation modulation = Modulation::QPSK;
  int l_f = 3000;  ///< frame length including the cyclic prefix
  int l_cp = 0;
  int l_d = 18;  ///< data symbols per cell
  int l_w = 50;  ///< one-sided Wiener tap count
  int trials = 1000;
  std::uint64_t master_seed = 1;

  /// Throws Error{InvalidConfig} or Error{NonIntegerCellCount}.
  void validate() const;

  int tap_length() const { return 2 * l_w + 1; }
};

/// Reads a config from JSON. Every key must be one of the SystemConfig field
/// names; absent keys keep their defaults.
SystemConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SystemConfig& c);
SystemConfig load_config(const std::filesystem::path& path);

double snr_db_to_noise_var(double snr_db);

/// Frame geometry. Symbol indices are 1-based: m = 1 is the first pilot
/// symbol after the CP and the CP occupies -l_cp+1 .. 0.
struct FramePlan {
  int n_t = 0;
  int l_f = 0;
  int l_cp = 0;
  int l_d = 0;
  int l_p = 0;
  int l_c = 0;
  int n_c = 0;
  double r_p = 0.0;
  std::vector<int> group_start;  ///< first symbol index of each pilot group
  std::vector<int> ref_index;    ///< m_i, reference symbol of each group

  /// Column of symbol index m in an l_f-wide frame matrix.
  int column(int m) const { return m + l_cp - 1; }
  /// Symbols after the CP.
  int payload() const { return l_f - l_cp; }
};

FramePlan make_frame_plan(const SystemConfig& config);

/// Orthogonal, unit-modulus pilot block (DFT matrix); column m is transmitted
/// at the m-th symbol of every pilot group.
struct PilotBlock {
  CMatrix s;
  int n_t() const { return static_cast<int>(s.rows()); }
};

PilotBlock pilot_block(int n_t);

struct SymbolKind {
  enum class Type { CP, Pilot, Data };
  Type type = Type::CP;
  int index = 0;   ///< pilot group / cell number (1-based); 0 for CP
  int offset = 0;  ///< 1-based position within the pilot group or data block
  bool operator==(const SymbolKind&) const = default;
};

SymbolKind symbol_kind(int m, const FramePlan& plan);

}  // namespace pnest
