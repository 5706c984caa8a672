#include "pnest/airsim.hpp"
#include "pnest/decoders.hpp"
#include "pnest/errors.hpp"
#include "pnest/rng.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace pnest;

namespace {

CVector random_symbols(const Constellation& c, int n, RandomStream& rng, std::vector<int>* idx = nullptr) {
  CVector s(n);
  for (int i = 0; i < n; ++i) {
    const int k = static_cast<int>(rng.next_u64() % c.size());
    s(i) = c.points[k];
    if (idx) idx->push_back(k);
  }
  return s;
}

CVector add_noise(CVector y, double s2, RandomStream& rng) {
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += rng.complex_normal(s2);
  return y;
}

}  // namespace

TEST(Mmse, IdentityChannel) {
  RandomStream rng(1);
  for (Modulation m : {Modulation::BPSK, Modulation::QPSK, Modulation::QAM16}) {
    const Constellation& c = constellation(m);
    const CVector s = random_symbols(c, 3, rng);
    const DecodeResult r = mmse_decode(s, CMatrix::Identity(3, 3), 1e-12, c);
    EXPECT_LT((r.symbols - s).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_FALSE(r.metric.has_value());
  }
}

TEST(Mmse, UnitaryChannelNoiseless) {
  RandomStream rng(2);
  for (Modulation m : {Modulation::BPSK, Modulation::QPSK, Modulation::QAM16}) {
    const Constellation& c = constellation(m);
    for (int t = 0; t < 50; ++t) {
      const CMatrix u = Eigen::HouseholderQR<CMatrix>(sample_channel(4, 4, rng)).householderQ();
      const CVector s = random_symbols(c, 4, rng);
      EXPECT_LT((mmse_decode(u * s, u, 1e-12, c).symbols - s).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Mmse, Errors) {
  const Constellation& c = constellation(Modulation::QPSK);
  try {
    mmse_decode(CVector::Zero(2), CMatrix::Zero(2, 2), 0.0, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularSystem);
  }
  EXPECT_THROW(mmse_decode(CVector::Zero(1), CMatrix::Ones(1, 2), 0.1, c), Error);
}

TEST(Mld, MatchesBruteForce) {
  RandomStream rng(3);
  const Constellation& c = constellation(Modulation::QPSK);
  for (int t = 0; t < 1000; ++t) {
    const CMatrix h = sample_channel(2, 2, rng);
    const CVector y = add_noise(h * random_symbols(c, 2, rng), 0.5, rng);
    EXPECT_EQ(mld_decode(y, h, c).indices, oracle::brute_force_mld_2(y, h, c));
  }
}

TEST(Mld, MetricIsOptimal) {
  RandomStream rng(4);
  const Constellation& c = constellation(Modulation::QAM16);
  for (int t = 0; t < 50; ++t) {
    const CMatrix h = sample_channel(3, 2, rng);
    const CVector y = add_noise(h * random_symbols(c, 2, rng), 0.3, rng);
    const DecodeResult r = mld_decode(y, h, c);
    ASSERT_TRUE(r.metric.has_value());
    EXPECT_NEAR(*r.metric, (y - h * r.symbols).squaredNorm(), 1e-12);
    for (int a = 0; a < 100; ++a) EXPECT_LE(*r.metric, (y - h * random_symbols(c, 2, rng)).squaredNorm());
  }
}

TEST(Mld, NoiselessAndScalar) {
  RandomStream rng(5);
  const Constellation& c = constellation(Modulation::QAM16);
  for (int t = 0; t < 50; ++t) {
    const CMatrix h = sample_channel(2, 2, rng);
    std::vector<int> idx;
    const CVector s = random_symbols(c, 2, rng, &idx);
    EXPECT_EQ(mld_decode(h * s, h, c).indices, idx);
    const cplx g = rng.complex_normal(1.0);
    const cplx y1 = g * c.points[idx[0]] + rng.complex_normal(0.1);
    EXPECT_EQ(mld_decode(CVector::Constant(1, y1), CMatrix::Constant(1, 1, g), c).indices[0], c.slice(y1 / g));
  }
}

TEST(Mld, TiesGoToFirstTuple) {
  const Constellation& c = constellation(Modulation::QPSK);
  EXPECT_EQ(mld_decode(CVector::Zero(2), CMatrix::Zero(2, 2), c).indices, (std::vector<int>{0, 0}));
}

TEST(Mld, SearchSpaceTooLarge) {
  const Constellation& c = constellation(Modulation::QAM16);
  try {
    mld_decode(CVector::Zero(8), CMatrix::Identity(8, 8), c);  // 16^8 > 1e6
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SearchSpaceTooLarge);
  }
}

TEST(Mld, PhaseCompositionEquivariance) {
  RandomStream rng(6);
  const Constellation& c = constellation(Modulation::QPSK);
  for (int t = 0; t < 200; ++t) {
    const CMatrix h = sample_channel(2, 2, rng);
    CMatrix phi = CMatrix::Zero(2, 2), psi = CMatrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i) {
      phi(i, i) = unit_phasor(rng.uniform(-kPi, kPi));
      psi(i, i) = unit_phasor(kPi / 2 * static_cast<double>(rng.next_u64() % 4));  // maps QPSK onto itself
    }
    const CVector y = add_noise(phi * h * psi * random_symbols(c, 2, rng), 0.2, rng);
    const DecodeResult composed = mld_decode(y, phi * h * psi, c);
    const DecodeResult derotated = mld_decode(phi.adjoint() * y, h, c);
    EXPECT_LT((psi * composed.symbols - derotated.symbols).cwiseAbs().maxCoeff(), 1e-12);
  }
}

double mmse_mld_agreement(double s2, int n, std::uint64_t seed) {
  RandomStream rng(seed);
  const Constellation& c = constellation(Modulation::QPSK);
  int agree = 0;
  for (int t = 0; t < n; ++t) {
    const CMatrix h = sample_channel(2, 2, rng);
    const CVector y = add_noise(h * random_symbols(c, 2, rng), s2, rng);
    agree += mmse_decode(y, h, s2, c).indices == mld_decode(y, h, c).indices;
  }
  return static_cast<double>(agree) / n;
}

// On Rayleigh 2x2 MMSE has diversity one, so at 30 dB roughly 1.3e-3 of the
// vectors land on ill-conditioned channels where it departs from MLD.
TEST(Decoders, MmseAgreesWithMldAtHighSnr) {
  EXPECT_GE(mmse_mld_agreement(1e-3, 10000, 7), 0.998);
  EXPECT_GE(mmse_mld_agreement(1e-4, 10000, 7), 0.999);
}

TEST(Decoders, Names) {
  EXPECT_EQ(decoder_from_string("mmse"), Decoder::MMSE);
  EXPECT_EQ(decoder_from_string("MLD"), Decoder::MLD);
  EXPECT_EQ(to_string(Decoder::MLD), "mld");
  EXPECT_THROW(decoder_from_string("zf"), Error);
}
