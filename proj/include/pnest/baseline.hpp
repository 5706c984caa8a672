#pragma once

#include "pnest/config.hpp"
#include "pnest/types.hpp"

#include <vector>

namespace pnest {

/// Data-aided reference estimator: the LS estimate of each pilot group is held
/// as the channel for every symbol of its cell.
struct BaselineEstimate {
  std::vector<CMatrix> h_per_group;

  /// Estimate in force at frame column `col` (CP columns use the first group).
  const CMatrix& at_column(int col, const FramePlan& plan) const;
};

BaselineEstimate dae_estimate(const CMatrix& y_frame, const FramePlan& plan,
                              const PilotBlock& pilot);

}  // namespace pnest
