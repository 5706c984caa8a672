#include "pnest/estimator.hpp"

#include "json_matrix.hpp"
#include "pnest/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>

namespace pnest {

GroupObservation per_group_ls(const CMatrix& y_block, const PilotBlock& pilot) {
  const Eigen::Index n_t = pilot.s.rows();
  if (y_block.cols() != n_t)
    throw Error(ErrorKind::ShapeMismatch, "pilot block has " + std::to_string(y_block.cols()) +
                                              " columns, expected " + std::to_string(n_t));
  GroupObservation g;
  g.h_hat = y_block * pilot.s.adjoint() / static_cast<double>(n_t);
  g.a = g.h_hat.unaryExpr([](const cplx& z) { return angle(z); }).real();
  return g;
}

RMatrix amplitude_sq_aggregate(std::span<const GroupObservation> groups, double sigma_n_sq) {
  if (groups.empty()) throw Error(ErrorKind::EmptyInput, "no pilot groups");
  const auto& first = groups.front().h_hat;
  RMatrix acc = RMatrix::Zero(first.rows(), first.cols());
  for (const auto& g : groups) acc += g.h_hat.cwiseAbs2();
  acc /= static_cast<double>(groups.size());
  acc.array() -= sigma_n_sq / static_cast<double>(first.cols());
  return acc;
}

RMatrix amplitude_finalize(const RMatrix& amp_sq) {
  return amp_sq.cwiseMax(0.0).cwiseSqrt();
}

OnlineState amplitude_sq_online(OnlineState state, const GroupObservation& group,
                                double sigma_n_sq) {
  RMatrix obs = group.h_hat.cwiseAbs2();
  obs.array() -= sigma_n_sq / static_cast<double>(group.h_hat.cols());
  if (state.amp_updates == 0) {
    state.amp_sq = obs;
  } else {
    state.amp_sq = (1.0 - state.k_factor) * state.amp_sq + state.k_factor * obs;
  }
  ++state.amp_updates;
  return state;
}

OnlineState average_channel_online(OnlineState state, const CMatrix& group_estimate,
                                   double k_factor) {
  state.k_factor = k_factor;
  if (state.h_updates == 0) {
    state.h_run = group_estimate;
  } else {
    state.h_run = (1.0 - k_factor) * state.h_run + k_factor * group_estimate;
  }
  ++state.h_updates;
  return state;
}

RVector unwrap_sequence(const RVector& angles) {
  RVector out = angles;
  for (Eigen::Index i = 1; i < angles.size(); ++i)
    out(i) = out(i - 1) + wrap_to_pi(angles(i) - angles(i - 1));
  return out;
}

RMatrix build_c_matrix(int n_r, int n_t) {
  const int p = n_r + n_t - 1;
  RMatrix c = RMatrix::Zero(n_r * n_t, p);
  for (int l = 0; l < n_t; ++l) {
    for (int k = 0; k < n_r; ++k) {
      const int row = l * n_r + k;
      c(row, k) = 1.0;
      if (l < n_t - 1) c(row, n_r + l) = 1.0;
    }
  }
  return c;
}

WllsSystem make_wlls_system(const RMatrix& amp, int n_r, int n_t) {
  if (amp.rows() != n_r || amp.cols() != n_t)
    throw Error(ErrorKind::ShapeMismatch, "amplitude matrix shape");
  const int p = n_r + n_t - 1;
  WllsSystem sys;
  sys.c = build_c_matrix(n_r, n_t);
  sys.weights = amp.reshaped();  // column-major vec
  sys.c_weighted = sys.weights.asDiagonal() * sys.c;

  Eigen::JacobiSVD<RMatrix> svd(sys.c_weighted, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& sv = svd.singularValues();
  const double cutoff = 1e-10 * (sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) rank += (sv(i) > cutoff && sv(i) > 0.0);
  if (rank < p)
    throw Error(ErrorKind::RankDeficientWeights,
                "weighted selection matrix has rank " + std::to_string(rank) + " < " +
                    std::to_string(p));
  sys.pinv_c_weighted = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
  return sys;
}

RVector wlls_noise_variance(const WllsSystem& system, double sigma_n_sq, int n_t) {
  return system.pinv_c_weighted.rowwise().squaredNorm() * (sigma_n_sq / (2.0 * n_t));
}

RVector inter_group_process_variance(const SystemConfig& config, const FramePlan& plan) {
  const int p = config.n_r + config.n_t - 1;
  RVector v(p);
  for (int q = 0; q < p; ++q) {
    v(q) = q < config.n_r ? plan.l_c * (config.sigma_dphi_sq + config.sigma_dpsi_sq)
                          : plan.l_c * 2.0 * config.sigma_dpsi_sq;
  }
  return v;
}

RMatrix wlls_solve(std::span<const GroupObservation> groups, const WllsSystem& system) {
  const Eigen::Index n_c = static_cast<Eigen::Index>(groups.size());
  if (n_c == 0) throw Error(ErrorKind::EmptyInput, "no pilot groups");
  const Eigen::Index n = system.c.rows();
  // Angles stacked column-major per group, then unwrapped along the group index.
  RMatrix alpha(n, n_c);
  for (Eigen::Index i = 0; i < n_c; ++i) {
    if (groups[i].a.size() != n) throw Error(ErrorKind::ShapeMismatch, "angle matrix shape");
    alpha.col(i) = groups[i].a.reshaped();
  }
  for (Eigen::Index r = 0; r < n; ++r) alpha.row(r) = unwrap_sequence(alpha.row(r).transpose()).transpose();
  return system.pinv_c_weighted * (system.weights.asDiagonal() * alpha);
}

RMatrix wiener_process_cov(int l_w, double process_var) {
  const int t = 2 * l_w + 1;
  const int c = l_w;
  RMatrix kp = RMatrix::Zero(t, t);
  for (int a = 0; a < t; ++a) {
    for (int b = 0; b < t; ++b) {
      if (a < c && b < c) kp(a, b) = process_var * (c - std::max(a, b));
      else if (a > c && b > c) kp(a, b) = process_var * (std::min(a, b) - c);
    }
  }
  return kp;
}

RVector wiener_coefficients(int l_w, double process_var, double noise_var) {
  const int t = 2 * l_w + 1;
  RMatrix k = wiener_process_cov(l_w, process_var);
  k.diagonal().array() += noise_var;
  Eigen::LLT<RMatrix> llt(k);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::SingularK, "Wiener autocorrelation matrix is not positive definite");
  const RVector x = llt.solve(RVector::Ones(t));
  if (!x.allFinite() || !(x.sum() != 0.0))
    throw Error(ErrorKind::SingularK, "Wiener normal equations are degenerate");
  return x / x.sum();
}

WienerFilter make_wiener_filter(int l_w, const RVector& process_var, const RVector& noise_var) {
  WienerFilter f;
  f.l_w = l_w;
  f.taps.reserve(process_var.size());
  for (Eigen::Index q = 0; q < process_var.size(); ++q)
    f.taps.push_back(wiener_coefficients(l_w, process_var(q), noise_var(q)));
  return f;
}

RMatrix wiener_smooth(const RMatrix& beta_hat, const WienerFilter& filter,
                      BoundaryPolicy boundary) {
  const int n_c = static_cast<int>(beta_hat.cols());
  const int l_w = filter.l_w;
  RMatrix out(beta_hat.rows(), n_c);
  for (Eigen::Index q = 0; q < beta_hat.rows(); ++q) {
    const RVector& w = filter.taps.at(q);
    for (int i = 0; i < n_c; ++i) {
      double acc = 0.0;
      double norm = 0.0;
      for (int j = -l_w; j <= l_w; ++j) {
        int src = i + j;
        if (src < 0 || src >= n_c) {
          if (boundary == BoundaryPolicy::Renormalize) continue;
          src = std::clamp(src, 0, n_c - 1);
        }
        acc += w(j + l_w) * beta_hat(q, src);
        norm += w(j + l_w);
      }
      out(q, i) = acc / norm;
    }
  }
  return out;
}

namespace {

void apply_phase_diagonals(CMatrix& h, const RVector& beta_col, double sign) {
  const Eigen::Index n_r = h.rows();
  const Eigen::Index n_t = h.cols();
  if (beta_col.size() != n_r + n_t - 1)
    throw Error(ErrorKind::ShapeMismatch, "phase vector length " + std::to_string(beta_col.size()));
  for (Eigen::Index k = 0; k < n_r; ++k) h.row(k) *= unit_phasor(sign * beta_col(k));
  for (Eigen::Index l = 0; l + 1 < n_t; ++l) h.col(l) *= unit_phasor(sign * beta_col(n_r + l));
}

}  // namespace

CMatrix recover_group_channel(const CMatrix& y_block, const PilotBlock& pilot,
                              const RVector& beta_col) {
  CMatrix h = per_group_ls(y_block, pilot).h_hat;
  apply_phase_diagonals(h, beta_col, -1.0);
  return h;
}

CMatrix average_channel(std::span<const CMatrix> recovered) {
  if (recovered.empty()) throw Error(ErrorKind::EmptyInput, "no recovered groups");
  CMatrix acc = CMatrix::Zero(recovered.front().rows(), recovered.front().cols());
  for (const auto& h : recovered) acc += h;
  return acc / static_cast<double>(recovered.size());
}

RMatrix interpolate_beta(const RMatrix& beta_smooth, const FramePlan& plan) {
  const int n_c = static_cast<int>(beta_smooth.cols());
  if (n_c < 1) throw Error(ErrorKind::EmptyInput, "no smoothed phases");
  const std::vector<int>& ref = plan.ref_index;
  RMatrix out(beta_smooth.rows(), plan.l_f);
  int i = 0;  // index of the last reference at or before m
  for (int col = 0; col < plan.l_f; ++col) {
    const int m = col - plan.l_cp + 1;
    if (m <= ref.front()) {
      out.col(col) = beta_smooth.col(0);
      continue;
    }
    if (m >= ref[n_c - 1]) {
      out.col(col) = beta_smooth.col(n_c - 1);
      continue;
    }
    while (ref[i + 1] <= m) ++i;
    const double t = static_cast<double>(m - ref[i]) / (ref[i + 1] - ref[i]);
    out.col(col) = (1.0 - t) * beta_smooth.col(i) + t * beta_smooth.col(i + 1);
  }
  return out;
}

CMatrix compose_equivalent_channel(const RVector& beta_col, const CMatrix& h_hat) {
  CMatrix h = h_hat;
  apply_phase_diagonals(h, beta_col, 1.0);
  return h;
}

CMatrix group_block(const CMatrix& y_frame, const FramePlan& plan, int i) {
  return y_frame.middleCols(plan.column(plan.group_start.at(i)), plan.l_p);
}

EstimateBundle estimate_frame(const CMatrix& y_frame, const FramePlan& plan,
                              const SystemConfig& config, const EstimatorOptions& options) {
  if (y_frame.rows() != config.n_r || y_frame.cols() != plan.l_f)
    throw Error(ErrorKind::ShapeMismatch, "received frame shape");
  const PilotBlock pilot = pilot_block(config.n_t);
  const double k_factor = options.k_factor > 0.0 ? options.k_factor : 2.0 / (plan.n_c + 1);

  std::vector<GroupObservation> groups;
  groups.reserve(plan.n_c);
  for (int i = 0; i < plan.n_c; ++i) groups.push_back(per_group_ls(group_block(y_frame, plan, i), pilot));

  EstimateBundle b;
  if (options.online) {
    OnlineState st;
    st.k_factor = k_factor;
    for (const auto& g : groups) st = amplitude_sq_online(std::move(st), g, config.sigma_n_sq);
    b.amp = amplitude_finalize(st.amp_sq);
  } else {
    b.amp = amplitude_finalize(amplitude_sq_aggregate(groups, config.sigma_n_sq));
  }

  const WllsSystem sys = make_wlls_system(b.amp, config.n_r, config.n_t);
  b.noise_var = wlls_noise_variance(sys, config.sigma_n_sq, config.n_t);
  b.process_var = inter_group_process_variance(config, plan);
  b.beta_hat = wlls_solve(groups, sys);

  const WienerFilter filter = make_wiener_filter(config.l_w, b.process_var, b.noise_var);
  b.beta_smooth = wiener_smooth(b.beta_hat, filter, options.boundary);

  std::vector<CMatrix> recovered;
  recovered.reserve(plan.n_c);
  for (int i = 0; i < plan.n_c; ++i) {
    CMatrix h = groups[i].h_hat;
    apply_phase_diagonals(h, b.beta_smooth.col(i), -1.0);
    recovered.push_back(std::move(h));
  }
  if (options.online) {
    OnlineState st;
    for (const auto& h : recovered) st = average_channel_online(std::move(st), h, k_factor);
    b.h_hat = st.h_run;
  } else {
    b.h_hat = average_channel(recovered);
  }
  b.beta_interp = interpolate_beta(b.beta_smooth, plan);
  return b;
}

nlohmann::json to_json(const EstimateBundle& b) {
  return {{"amp", detail::real_rows(b.amp)},
          {"beta_hat", detail::real_rows(b.beta_hat)},
          {"beta_smooth", detail::real_rows(b.beta_smooth)},
          {"h_hat", detail::complex_rows(b.h_hat)},
          {"beta_interp", detail::real_rows(b.beta_interp)},
          {"noise_var", detail::real_vector(b.noise_var)},
          {"process_var", detail::real_vector(b.process_var)}};
}

EstimateBundle estimate_bundle_from_json(const nlohmann::json& j) {
  EstimateBundle b;
  b.amp = detail::read_real_rows(j.at("amp"));
  b.beta_hat = detail::read_real_rows(j.at("beta_hat"));
  b.beta_smooth = detail::read_real_rows(j.at("beta_smooth"));
  b.h_hat = detail::read_complex_rows(j.at("h_hat"));
  b.beta_interp = detail::read_real_rows(j.at("beta_interp"));
  b.noise_var = detail::read_real_vector(j.at("noise_var"));
  b.process_var = detail::read_real_vector(j.at("process_var"));
  return b;
}

}  // namespace pnest
