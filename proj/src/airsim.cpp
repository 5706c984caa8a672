#include "pnest/airsim.hpp"

#include "pnest/errors.hpp"
#include "json_matrix.hpp"

namespace pnest {

CMatrix ChannelRealization::equivalent_channel(int col) const {
  CMatrix out = h;
  for (Eigen::Index k = 0; k < h.rows(); ++k)
    for (Eigen::Index l = 0; l < h.cols(); ++l)
      out(k, l) *= unit_phasor(phi(k, col) + psi(l, col));
  return out;
}

CMatrix sample_channel(int n_r, int n_t, RandomStream& rng) {
  CMatrix h(n_r, n_t);
  for (int k = 0; k < n_r; ++k)
    for (int l = 0; l < n_t; ++l) h(k, l) = rng.complex_normal(1.0);
  return h;
}

RMatrix compose_beta(const RMatrix& phi, const RMatrix& psi) {
  const Eigen::Index n_r = phi.rows();
  const Eigen::Index n_t = psi.rows();
  RMatrix beta(n_r + n_t - 1, phi.cols());
  const auto ref = psi.row(n_t - 1);
  for (Eigen::Index k = 0; k < n_r; ++k) beta.row(k) = phi.row(k) + ref;
  for (Eigen::Index l = 0; l + 1 < n_t; ++l) beta.row(n_r + l) = psi.row(l) - ref;
  return beta;
}

PhaseWalks sample_phase_walks(const SystemConfig& config, const FramePlan& plan,
                              RandomStream& rng) {
  const int cols = plan.l_f;
  PhaseWalks w;
  auto walk = [&](int rows, double var) {
    RMatrix x(rows, cols);
    const double sd = std::sqrt(var);
    for (int r = 0; r < rows; ++r) {
      x(r, 0) = rng.uniform(-kPi, kPi);
      for (int c = 1; c < cols; ++c) x(r, c) = x(r, c - 1) + sd * rng.normal();
    }
    return x;
  };
  w.phi = walk(config.n_r, config.sigma_dphi_sq);
  w.psi = walk(config.n_t, config.sigma_dpsi_sq);
  w.beta = compose_beta(w.phi, w.psi);
  return w;
}

TransmitFrame make_transmit_frame(const SystemConfig& config, const FramePlan& plan,
                                  RandomStream& data_rng) {
  const Constellation& c = constellation(config.modulation);
  const PilotBlock pilot = pilot_block(config.n_t);
  TransmitFrame f;
  f.s = CMatrix::Zero(config.n_t, plan.l_f);
  f.data_m.reserve(static_cast<std::size_t>(plan.n_c) * plan.l_d);
  f.bits.reserve(static_cast<std::size_t>(plan.n_c) * plan.l_d * config.n_t * c.bits_per_symbol);
  for (int m = 1; m <= plan.payload(); ++m) {
    const SymbolKind kind = symbol_kind(m, plan);
    const int col = plan.column(m);
    if (kind.type == SymbolKind::Type::Pilot) {
      f.s.col(col) = pilot.s.col(kind.offset - 1);
      continue;
    }
    f.data_m.push_back(m);
    for (int l = 0; l < config.n_t; ++l) {
      const int idx = static_cast<int>(data_rng.next_u64() % static_cast<std::uint64_t>(c.size()));
      f.s(l, col) = c.points[idx];
      append_label_bits(c, idx, f.bits);
    }
  }
  if (plan.l_cp > 0) f.s.leftCols(plan.l_cp) = f.s.rightCols(plan.l_cp);
  return f;
}

ReceivedFrame transmit(const CMatrix& h, const RMatrix& phi, const RMatrix& psi,
                       const CMatrix& s_frame, double sigma_n_sq, RandomStream* noise_rng) {
  const Eigen::Index n_r = h.rows();
  const Eigen::Index n_t = h.cols();
  const Eigen::Index cols = s_frame.cols();
  if (s_frame.rows() != n_t || phi.rows() != n_r || psi.rows() != n_t || phi.cols() != cols ||
      psi.cols() != cols)
    throw Error(ErrorKind::ShapeMismatch, "transmit: inconsistent h/phi/psi/s shapes");
  ReceivedFrame out;
  out.s = s_frame;
  out.y.resize(n_r, cols);
  CVector ts(n_t);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index l = 0; l < n_t; ++l) ts(l) = unit_phasor(psi(l, c)) * s_frame(l, c);
    for (Eigen::Index k = 0; k < n_r; ++k) {
      cplx acc = 0.0;
      for (Eigen::Index l = 0; l < n_t; ++l) acc += h(k, l) * ts(l);
      out.y(k, c) = unit_phasor(phi(k, c)) * acc;
    }
  }
  if (noise_rng != nullptr) {
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index k = 0; k < n_r; ++k) out.y(k, c) += noise_rng->complex_normal(sigma_n_sq);
  }
  return out;
}

nlohmann::json to_json(const ChannelRealization& r) {
  return {{"h", detail::complex_rows(r.h)},
          {"phi", detail::real_rows(r.phi)},
          {"psi", detail::real_rows(r.psi)},
          {"beta", detail::real_rows(r.beta)}};
}

ChannelRealization channel_realization_from_json(const nlohmann::json& j) {
  ChannelRealization r;
  r.h = detail::read_complex_rows(j.at("h"));
  r.phi = detail::read_real_rows(j.at("phi"));
  r.psi = detail::read_real_rows(j.at("psi"));
  r.beta = detail::read_real_rows(j.at("beta"));
  return r;
}

}  // namespace pnest
