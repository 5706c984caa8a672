#include "pnest/baseline.hpp"

#include "pnest/errors.hpp"
#include "pnest/estimator.hpp"

#include <algorithm>

namespace pnest {

const CMatrix& BaselineEstimate::at_column(int col, const FramePlan& plan) const {
  const int m = col - plan.l_cp + 1;
  const int cell = m <= 0 ? 0 : (m - 1) / plan.l_c;
  return h_per_group.at(std::min<std::size_t>(cell, h_per_group.size() - 1));
}

BaselineEstimate dae_estimate(const CMatrix& y_frame, const FramePlan& plan,
                              const PilotBlock& pilot) {
  if (y_frame.cols() != plan.l_f || pilot.n_t() != plan.l_p)
    throw Error(ErrorKind::ShapeMismatch, "frame or pilot shape does not match the plan");
  BaselineEstimate b;
  b.h_per_group.reserve(plan.n_c);
  for (int i = 0; i < plan.n_c; ++i)
    b.h_per_group.push_back(per_group_ls(group_block(y_frame, plan, i), pilot).h_hat);
  return b;
}

}  // namespace pnest
