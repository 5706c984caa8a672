#include "pnest/rng.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace pnest;

TEST(Rng, SeedsAreDeterministic) {
  EXPECT_EQ(trial_seed(1, 2, 3, StreamId::Noise), trial_seed(1, 2, 3, StreamId::Noise));
}

TEST(Rng, SeedsSeparateKeys) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t sweep = 0; sweep < 4; ++sweep)
    for (std::uint64_t trial = 0; trial < 50; ++trial)
      for (auto s : {StreamId::Channel, StreamId::Phase, StreamId::Data, StreamId::Noise})
        seen.insert(trial_seed(7, sweep, trial, s));
  EXPECT_EQ(seen.size(), 4u * 50u * 4u);
}

TEST(Rng, ComplexNormalVariance) {
  RandomStream rng(42);
  double re2 = 0.0, im2 = 0.0, cross = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const cplx z = rng.complex_normal(2.0);
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    cross += z.real() * z.imag();
  }
  EXPECT_NEAR(re2 / n, 1.0, 0.02);
  EXPECT_NEAR(im2 / n, 1.0, 0.02);
  EXPECT_NEAR(cross / n, 0.0, 0.02);
}
