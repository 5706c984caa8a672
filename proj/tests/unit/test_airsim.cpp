#include "pnest/airsim.hpp"
#include "pnest/errors.hpp"

#include <gtest/gtest.h>

using namespace pnest;

namespace {

SystemConfig long_walk(double var) {
  SystemConfig c;
  c.n_t = 1;
  c.n_r = 1;
  c.l_d = 0;
  c.l_f = 100001;
  c.sigma_dphi_sq = var;
  c.sigma_dpsi_sq = var;
  return c;
}

}  // namespace

TEST(SampleChannel, Moments) {
  RandomStream rng(1);
  cplx mean = 0.0;
  double power = 0.0, re2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const cplx h = sample_channel(1, 1, rng)(0, 0);
    mean += h;
    power += std::norm(h);
    re2 += h.real() * h.real();
  }
  EXPECT_LT(std::abs(mean / double(n)), 0.02);
  EXPECT_NEAR(power / n, 1.0, 0.02);
  EXPECT_NEAR(re2 / n, 0.5, 0.01);
}

TEST(SampleChannel, Deterministic) {
  RandomStream a(9), b(9);
  EXPECT_EQ(sample_channel(3, 2, a), sample_channel(3, 2, b));
}

TEST(PhaseWalks, ZeroInnovationIsConstant) {
  SystemConfig c;
  c.sigma_dphi_sq = c.sigma_dpsi_sq = 0.0;
  const FramePlan p = make_frame_plan(c);
  RandomStream rng(3);
  const PhaseWalks w = sample_phase_walks(c, p, rng);
  for (Eigen::Index r = 0; r < w.phi.rows(); ++r)
    EXPECT_EQ((w.phi.row(r).array() - w.phi(r, 0)).abs().maxCoeff(), 0.0);
  for (Eigen::Index r = 0; r < w.psi.rows(); ++r)
    EXPECT_EQ((w.psi.row(r).array() - w.psi(r, 0)).abs().maxCoeff(), 0.0);
  EXPECT_GE(w.phi.minCoeff(), -kPi);
  EXPECT_LT(w.phi.maxCoeff(), kPi);
}

TEST(PhaseWalks, InnovationVarianceAndIndependence) {
  const SystemConfig c = long_walk(1e-4);
  const FramePlan p = make_frame_plan(c);
  RandomStream rng(5);
  const PhaseWalks w = sample_phase_walks(c, p, rng);
  const RVector d = (w.phi.row(0).tail(p.l_f - 1) - w.phi.row(0).head(p.l_f - 1)).transpose();
  const double var = d.squaredNorm() / d.size();
  EXPECT_NEAR(var / 1e-4, 1.0, 0.03);
  const double lag1 = d.head(d.size() - 1).dot(d.tail(d.size() - 1)) / (d.size() - 1) / var;
  EXPECT_LT(std::abs(lag1), 0.02);
}

TEST(PhaseWalks, BetaIdentity) {
  SystemConfig c;
  c.n_r = 3;
  c.n_t = 2;
  const FramePlan p = make_frame_plan(c);
  RandomStream rng(11);
  const PhaseWalks w = sample_phase_walks(c, p, rng);
  ASSERT_EQ(w.beta.rows(), 4);
  for (int m = 0; m < p.l_f; m += 97) {
    EXPECT_EQ(w.beta(0, m) - (w.phi(0, m) + w.psi(1, m)), 0.0);
    EXPECT_EQ(w.beta(2, m) - (w.phi(2, m) + w.psi(1, m)), 0.0);
    EXPECT_EQ(w.beta(3, m) - (w.psi(0, m) - w.psi(1, m)), 0.0);
  }
}

TEST(Transmit, IdentityChannelNoiseless) {
  SystemConfig c;
  const FramePlan p = make_frame_plan(c);
  RandomStream data(1);
  const TransmitFrame f = make_transmit_frame(c, p, data);
  const RMatrix phi = RMatrix::Zero(2, p.l_f), psi = RMatrix::Zero(2, p.l_f);
  const ReceivedFrame r = transmit(CMatrix::Identity(2, 2), phi, psi, f.s, 1.0, nullptr);
  EXPECT_EQ(r.y, f.s);
}

TEST(Transmit, ScalarReduction) {
  const CMatrix h = CMatrix::Constant(1, 1, cplx(0.3, -0.7));
  RMatrix phi(1, 3), psi(1, 3);
  phi << 0.1, 0.2, 0.3;
  psi << -1.0, 0.5, 2.0;
  CMatrix s(1, 3);
  s << cplx(1, 0), cplx(0, 1), cplx(-1, 0);
  const ReceivedFrame r = transmit(h, phi, psi, s, 0.0, nullptr);
  for (int m = 0; m < 3; ++m)
    EXPECT_LT(std::abs(r.y(0, m) - h(0, 0) * unit_phasor(phi(0, m) + psi(0, m)) * s(0, m)), 1e-15);
}

TEST(Transmit, NoiseVariance) {
  const int cols = 50000;
  const CMatrix h = CMatrix::Identity(2, 2);
  const RMatrix phi = RMatrix::Zero(2, cols), psi = RMatrix::Zero(2, cols);
  const CMatrix s = CMatrix::Ones(2, cols);
  RandomStream noise(17);
  const ReceivedFrame r = transmit(h, phi, psi, s, 0.05, &noise);
  const double var = (r.y - s).cwiseAbs2().sum() / (2.0 * cols);
  EXPECT_NEAR(var / 0.05, 1.0, 0.03);
}

TEST(Transmit, ShapeMismatch) {
  const RMatrix phi = RMatrix::Zero(2, 4), psi = RMatrix::Zero(2, 5);
  try {
    transmit(CMatrix::Identity(2, 2), phi, psi, CMatrix::Zero(2, 4), 0.1, nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}

TEST(Transmit, EquivalentChannelKeepsAmplitudes) {
  SystemConfig c;
  c.n_r = 3;
  const FramePlan p = make_frame_plan(c);
  RandomStream a(1), b(2);
  ChannelRealization r;
  r.h = sample_channel(3, 2, a);
  PhaseWalks w = sample_phase_walks(c, p, b);
  r.phi = w.phi;
  r.psi = w.psi;
  r.beta = w.beta;
  for (int col : {0, 17, 2999})
    EXPECT_LT((r.equivalent_channel(col).cwiseAbs() - r.h.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(TransmitFrame, LayoutAndBits) {
  SystemConfig c;
  c.l_f = 100;
  const FramePlan p = make_frame_plan(c);
  RandomStream data(4);
  const TransmitFrame f = make_transmit_frame(c, p, data);
  const PilotBlock pb = pilot_block(2);
  EXPECT_EQ(f.s.col(p.column(21)), pb.s.col(0));
  EXPECT_EQ(f.s.col(p.column(22)), pb.s.col(1));
  EXPECT_EQ(f.data_m.size(), 5u * 18u);
  EXPECT_EQ(f.bits.size(), 5u * 18u * 2u * 2u);
  // Data columns carry unit average power.
  double power = 0.0;
  for (int m : f.data_m) power += f.s.col(p.column(m)).squaredNorm();
  EXPECT_NEAR(power / (2.0 * f.data_m.size()), 1.0, 1e-12);
}

TEST(TransmitFrame, CyclicPrefixRepeatsTail) {
  SystemConfig c;
  c.l_f = 120;
  c.l_cp = 20;
  const FramePlan p = make_frame_plan(c);
  RandomStream data(4);
  const TransmitFrame f = make_transmit_frame(c, p, data);
  EXPECT_EQ(f.s.leftCols(20), f.s.rightCols(20));
}

TEST(Determinism, SameSeedsSameFrame) {
  SystemConfig c;
  const FramePlan p = make_frame_plan(c);
  auto run = [&] {
    RandomStream ch(trial_seed(1, 0, 5, StreamId::Channel)), ph(trial_seed(1, 0, 5, StreamId::Phase)),
        da(trial_seed(1, 0, 5, StreamId::Data)), no(trial_seed(1, 0, 5, StreamId::Noise));
    const CMatrix h = sample_channel(2, 2, ch);
    const PhaseWalks w = sample_phase_walks(c, p, ph);
    const TransmitFrame f = make_transmit_frame(c, p, da);
    return transmit(h, w.phi, w.psi, f.s, c.sigma_n_sq, &no).y;
  };
  EXPECT_EQ(run(), run());
}

TEST(ChannelRealization, JsonRoundTrip) {
  ChannelRealization r;
  RandomStream rng(3);
  r.h = sample_channel(2, 2, rng);
  r.phi = RMatrix::Random(2, 4);
  r.psi = RMatrix::Random(2, 4);
  r.beta = compose_beta(r.phi, r.psi);
  const nlohmann::json j = to_json(r);
  EXPECT_EQ(j.at("h").at(1).at(0).size(), 2u);
  const ChannelRealization back = channel_realization_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.h, r.h);
  EXPECT_EQ(back.beta, r.beta);
}
