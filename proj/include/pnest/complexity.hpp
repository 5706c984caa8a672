#pragma once

#include <string_view>
#include <vector>

namespace pnest {

/// Per-symbol operation counts of the estimator; C_M weights multiplications.
struct ComplexityBreakdown {
  double amp_mul = 0, amp_add = 0;
  double wlls_mul = 0, wlls_add = 0;
  double wiener_mul = 0, wiener_add = 0;
  double hhat_mul = 0, hhat_add = 0;
  double total = 0;

  double mul() const { return amp_mul + wlls_mul + wiener_mul + hhat_mul; }
  double add() const { return amp_add + wlls_add + wiener_add + hhat_add; }
};

/// Throws Error{InvalidGeometry} when l_c != n_t + l_d or any input is non-positive.
ComplexityBreakdown complexity_breakdown(int n_r, int n_t, int l_c, int l_d, double l_f, int l_w,
                                         double c_m);

/// Geometry of the reference comparison table: pilot rate 0.1 with one
/// n_t-symbol pilot group per cell, 1e5-symbol frames.
ComplexityBreakdown table_complexity(int n_antennas, int l_w, double c_m = 1.0);

/// Published complexity of competing trackers (operations per symbol at
/// 2x2 / 4x4 / 8x8). Carried as constants, never computed.
struct LiteratureComplexity {
  std::string_view algorithm;
  std::string_view source;
  double at_2x2;
  double at_4x4;
  double at_8x8;
};

const std::vector<LiteratureComplexity>& literature_complexity();

}  // namespace pnest
