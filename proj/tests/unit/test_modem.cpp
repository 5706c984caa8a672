#include "pnest/errors.hpp"
#include "pnest/modem.hpp"
#include "pnest/rng.hpp"

#include <gtest/gtest.h>

#include <bit>

using namespace pnest;

namespace {

const Modulation kAll[] = {Modulation::BPSK, Modulation::QPSK, Modulation::QAM16};

Bits label_bits(unsigned label, int width) {
  Bits b;
  for (int j = width - 1; j >= 0; --j) b.push_back((label >> j) & 1u);
  return b;
}

}  // namespace

TEST(Modem, Bpsk) {
  const Bits bits = {0, 1};
  const auto s = modulate(bits, Modulation::BPSK);
  EXPECT_EQ(s[0], cplx(1.0));
  EXPECT_EQ(s[1], cplx(-1.0));
}

TEST(Modem, QpskQuadrantOne) {
  const Bits bits = {0, 0};
  const auto s = modulate(bits, Modulation::QPSK);
  EXPECT_LT(std::abs(s[0] - cplx(1.0, 1.0) / std::sqrt(2.0)), 1e-15);
}

TEST(Modem, Qam16Scaling) {
  const Constellation& c = constellation(Modulation::QAM16);
  for (cplx p : c.points) {
    const double re = p.real() * std::sqrt(10.0), im = p.imag() * std::sqrt(10.0);
    EXPECT_NEAR(std::abs(re), std::round(std::abs(re)), 1e-12);
    EXPECT_NEAR(std::abs(im), std::round(std::abs(im)), 1e-12);
  }
}

TEST(Modem, UnitPowerAndBijection) {
  for (Modulation m : kAll) {
    const Constellation& c = constellation(m);
    double power = 0.0;
    for (cplx p : c.points) power += std::norm(p);
    EXPECT_NEAR(power / c.size(), 1.0, 1e-12);
    EXPECT_EQ(c.size(), 1 << c.bits_per_symbol);
    std::vector<bool> seen(c.size());
    for (unsigned l : c.labels) seen.at(l) = true;
    for (bool s : seen) EXPECT_TRUE(s);
  }
}

TEST(Modem, GrayNeighbours) {
  for (Modulation m : kAll) {
    const Constellation& c = constellation(m);
    double dmin = 1e9;
    for (int a = 0; a < c.size(); ++a)
      for (int b = a + 1; b < c.size(); ++b) dmin = std::min(dmin, std::abs(c.points[a] - c.points[b]));
    for (int a = 0; a < c.size(); ++a)
      for (int b = a + 1; b < c.size(); ++b)
        if (std::abs(c.points[a] - c.points[b]) < dmin * (1 + 1e-9))
          EXPECT_EQ(std::popcount(c.labels[a] ^ c.labels[b]), 1) << a << " " << b;
  }
}

TEST(Modem, RoundTripAllPatterns) {
  for (Modulation m : kAll) {
    const Constellation& c = constellation(m);
    for (unsigned l = 0; l < static_cast<unsigned>(c.size()); ++l) {
      const Bits b = label_bits(l, c.bits_per_symbol);
      EXPECT_EQ(demodulate_hard(modulate(b, m), m), b);
    }
  }
}

TEST(Modem, NearestPoint) {
  const std::vector<cplx> y = {cplx(0.9, 0.8)};
  EXPECT_EQ(demodulate_hard(y, Modulation::QPSK), (Bits{0, 0}));
}

TEST(Modem, TieGoesToLowestIndex) {
  const std::vector<cplx> y = {cplx(0.0, 0.0)};
  EXPECT_EQ(demodulate_hard(y, Modulation::BPSK), (Bits{0}));
}

TEST(Modem, BitCountMismatch) {
  const Bits b = {0, 1, 1};
  try {
    modulate(b, Modulation::QPSK);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BitCountMismatch);
  }
}

TEST(Modem, HighSnrRoundTrip) {
  RandomStream rng(8);
  for (Modulation m : kAll) {
    const int bps = constellation(m).bits_per_symbol;
    Bits bits(10000 * bps);
    for (auto& b : bits) b = rng.bit();
    auto s = modulate(bits, m);
    for (auto& x : s) x += rng.complex_normal(1e-3);
    EXPECT_EQ(bit_errors(bits, demodulate_hard(s, m)), 0u);
  }
}

TEST(BitErrorRate, Basics) {
  Bits a(1000, 0), b(1000, 1);
  EXPECT_EQ(bit_error_rate(a, a), 0.0);
  EXPECT_EQ(bit_error_rate(a, b), 1.0);
  Bits c = a;
  c[500] = 1;
  EXPECT_DOUBLE_EQ(bit_error_rate(a, c), 0.001);
  Bits d(999, 0);
  try {
    bit_error_rate(a, d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
  }
}
