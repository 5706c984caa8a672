#include "pnest/complexity.hpp"
#include "pnest/errors.hpp"

#include <gtest/gtest.h>

using namespace pnest;

TEST(Complexity, PublishedTableCells) {
  struct Cell {
    int n;
    int l_w;
    double expected;
  };
  const Cell cells[] = {{2, 5, 19.6}, {4, 5, 58.5}, {8, 5, 193.5},
                        {2, 50, 57.0}, {4, 50, 100.4}, {8, 50, 237.6}};
  for (const Cell& c : cells) EXPECT_NEAR(table_complexity(c.n, c.l_w).total, c.expected, 0.05) << c.n << " " << c.l_w;
}

TEST(Complexity, TotalIsWeightedSum) {
  const ComplexityBreakdown b = complexity_breakdown(4, 2, 20, 18, 3000, 50, 3.0);
  EXPECT_NEAR(b.total, 3.0 * b.mul() + b.add(), 1e-12);
  for (double v : {b.amp_mul, b.amp_add, b.wlls_mul, b.wlls_add, b.wiener_mul, b.wiener_add, b.hhat_mul, b.hhat_add})
    EXPECT_GE(v, 0.0);
}

TEST(Complexity, InvalidGeometry) {
  try {
    complexity_breakdown(2, 2, 21, 18, 1e5, 5, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidGeometry);
  }
  EXPECT_THROW(complexity_breakdown(0, 2, 20, 18, 1e5, 5, 1.0), Error);
  EXPECT_THROW(complexity_breakdown(2, 2, 20, 18, 1e5, -1, 1.0), Error);
}

TEST(Complexity, Monotone) {
  for (int n_r = 1; n_r < 8; ++n_r)
    EXPECT_LE(complexity_breakdown(n_r, 2, 20, 18, 1e5, 5, 1).total,
              complexity_breakdown(n_r + 1, 2, 20, 18, 1e5, 5, 1).total);
  for (int n_t = 1; n_t < 8; ++n_t)
    EXPECT_LE(complexity_breakdown(8, n_t, 20, 20 - n_t, 1e5, 5, 1).total,
              complexity_breakdown(8, n_t + 1, 20, 19 - n_t, 1e5, 5, 1).total);
  for (int l_w = 1; l_w < 100; ++l_w)
    EXPECT_LE(complexity_breakdown(2, 2, 20, 18, 1e5, l_w, 1).total,
              complexity_breakdown(2, 2, 20, 18, 1e5, l_w + 1, 1).total);
}

TEST(Complexity, LiteratureRowsAreConstants) {
  const auto& rows = literature_complexity();
  ASSERT_FALSE(rows.empty());
  for (const auto& r : rows) {
    EXPECT_FALSE(r.algorithm.empty());
    EXPECT_FALSE(r.source.empty());
    EXPECT_GT(r.at_8x8, r.at_2x2);
  }
}
