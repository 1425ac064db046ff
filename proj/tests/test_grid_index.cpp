#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "fixtures.hpp"
#include "hdjoin/grid_index.hpp"

using namespace hdjoin;

TEST(CellCoords, FloorArithmetic) {
  const auto gp = GridParams::withBox(0.2f, 2, 2, {0, 0}, {5, 5});
  const float p[] = {0.35f, 0.71f};
  EXPECT_EQ(cellCoords(p, gp), (CellCoords{1, 3}));
  const float o[] = {0.0f, 0.0f};
  EXPECT_EQ(cellCoords(o, gp), (CellCoords{0, 0}));
}

TEST(CellCoords, BoundaryGoesToHigherCell) {
  const auto gp = GridParams::withBox(0.5f, 2, 2, {0, 0}, {4, 4});
  const float p[] = {1.0f, 0.5f};
  EXPECT_EQ(cellCoords(p, gp), (CellCoords{2, 1}));
}

TEST(CellCoords, TopEdgeClampsIntoGrid) {
  const auto d = Dataset::fromRows({0.0f, 0.0f, 1.0f, 1.0f}, 2);
  const auto gp = GridParams::fromData(d, 0.25f, 2);
  EXPECT_EQ(gp.widths, (std::vector<std::uint64_t>{5, 5}));
  const float p[] = {1.0f, 1.0f};
  EXPECT_EQ(cellCoords(p, gp), (CellCoords{4, 4}));
  const float outside[] = {-3.0f, 9.0f};
  EXPECT_EQ(cellCoords(outside, gp), (CellCoords{0, 4}));
}

TEST(GridParams, OriginIsDataMinimum) {
  const auto d = Dataset::fromRows({0.25f, 0.5f, 0.875f, 0.625f, 0.375f, 0.5625f}, 2);
  const auto gp = GridParams::fromData(d, 0.125f, 2);
  EXPECT_EQ(gp.origin, (std::vector<float>{0.25f, 0.5f}));
  EXPECT_EQ(gp.widths, (std::vector<std::uint64_t>{6, 2}));
}

TEST(GridParams, RejectsBadK) {
  const auto d = genUniform(10, 3, 0);
  EXPECT_THROW(GridParams::fromData(d, 0.1f, 1), InvalidArgument);
  EXPECT_THROW(GridParams::fromData(d, 0.1f, 4), InvalidArgument);
  EXPECT_NO_THROW(GridParams::fromData(d, 0.1f, 3));
}

TEST(GridParams, ReportsIdOverflow) {
  const auto d = genUniform(100, 20, 0);
  EXPECT_THROW(GridParams::fromData(d, 0.01f, 20), IdOverflow);
  EXPECT_NO_THROW(GridParams::fromData(d, 0.01f, 8));
}

TEST(Linearize, RowMajor) {
  const auto gp = GridParams::withBox(1.0f, 2, 2, {0, 0}, {7, 7});
  const std::uint64_t zero[] = {0, 0}, mid[] = {3, 3};
  EXPECT_EQ(linearize(zero, gp), 0u);
  EXPECT_EQ(linearize(mid, gp), 24u);
}

TEST(Linearize, RoundTripsRandomCells) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + rng.below(6);
    std::vector<std::uint64_t> widths(k);
    for (auto& w : widths) w = 1 + rng.below(40);
    const auto gp = GridParams::withBox(0.1f, k, k, std::vector<float>(k, 0.0f), widths);
    CellCoords c(k);
    for (std::size_t j = 0; j < k; ++j) c[j] = rng.below(widths[j]);
    EXPECT_EQ(delinearize(linearize(c, gp), gp), c);
  }
}

TEST(Build, FigureOneCells) {
  const auto d = fixtures::figureOnePoints();
  const auto g = buildIndex(d, fixtures::figureOneGrid(), 0);
  EXPECT_EQ(g.cellIds, (std::vector<CellId>{2, 8, 14, 18, 23, 24, 32, 34, 36, 47}));
  EXPECT_EQ(g.pointLookup.size(), d.count);
}

TEST(Build, IdenticalPointsShareOneCell) {
  const auto d = Dataset::fromRows(std::vector<float>(30, 0.4f), 3);
  const auto g = buildIndex(d, GridParams::fromData(d, 0.1f, 3), 0);
  EXPECT_EQ(g.nonEmptyCount(), 1u);
  EXPECT_EQ(g.cellRanges[0].size(), 10u);
}

TEST(Build, InvariantsOnRandomData) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = genExponential(1000, 5, 40.0, seed);
    const auto gp = GridParams::fromData(d, 0.02f, 3);
    const auto g = buildIndex(d, gp, 3);

    EXPECT_TRUE(std::is_sorted(g.cellIds.begin(), g.cellIds.end()));
    EXPECT_EQ(std::adjacent_find(g.cellIds.begin(), g.cellIds.end()), g.cellIds.end());
    std::uint64_t cells = 1;
    for (auto w : gp.widths) cells *= w;
    EXPECT_LE(g.nonEmptyCount(), std::min<std::uint64_t>(d.count, cells));

    // Lookup is a permutation of all ids, ranges tile it, u is sorted per cell.
    std::vector<PointId> ids = g.pointLookup;
    std::sort(ids.begin(), ids.end());
    std::vector<PointId> expect(d.count);
    std::iota(expect.begin(), expect.end(), 0);
    EXPECT_EQ(ids, expect);
    std::uint32_t next = 0;
    for (std::size_t h = 0; h < g.nonEmptyCount(); ++h) {
      const auto r = g.cellRanges[h];
      EXPECT_EQ(r.begin, next);
      EXPECT_GT(r.end, r.begin);
      next = r.end;
      for (std::uint32_t i = r.begin; i < r.end; ++i) {
        const auto p = d.point(g.pointLookup[i]);
        EXPECT_EQ(linearize(cellCoords(p, gp), gp), g.cellIds[h]);
        EXPECT_EQ(g.lookupU[i], p[3]);
        if (i > r.begin) {
          EXPECT_LE(g.lookupU[i - 1], g.lookupU[i]);
        }
      }
    }
    EXPECT_EQ(next, d.count);
  }
}

TEST(Adjacent, FigureOneQueryInCell24) {
  const auto d = fixtures::figureOnePoints();
  const auto gp = fixtures::figureOneGrid();
  const auto g = buildIndex(d, gp, 0);
  const std::uint64_t cell[] = {3, 3};
  std::vector<CellId> found;
  for (auto h : adjacentNonEmpty(cell, g, gp)) found.push_back(g.cellIds[h]);
  EXPECT_EQ(found, (std::vector<CellId>{18, 23, 24, 32}));
}

TEST(Adjacent, IsolatedPointSeesOnlyItsCell) {
  const auto d = Dataset::fromRows({0.0f, 0.0f, 0.9f, 0.9f}, 2);
  const auto gp = GridParams::fromData(d, 0.1f, 2);
  const auto g = buildIndex(d, gp, 0);
  const auto c = cellCoords(d.point(0), gp);
  const auto adj = adjacentNonEmpty(c, g, gp);
  ASSERT_EQ(adj.size(), 1u);
  EXPECT_EQ(g.cellIds[adj[0]], linearize(c, gp));
}

TEST(Adjacent, CornerProbesTwoToTheK) {
  for (std::size_t k = 2; k <= 5; ++k) {
    const auto gp = GridParams::withBox(1.0f, k, k, std::vector<float>(k, 0.0f), std::vector<std::uint64_t>(k, 6));
    GridIndex empty;
    const CellCoords corner(k, 0), far(k, 5), inner(k, 2);
    EXPECT_EQ(forEachAdjacentNonEmpty(corner, empty, gp, [](std::size_t) {}), std::size_t{1} << k);
    EXPECT_EQ(forEachAdjacentNonEmpty(far, empty, gp, [](std::size_t) {}), std::size_t{1} << k);
    EXPECT_EQ(forEachAdjacentNonEmpty(inner, empty, gp, [](std::size_t) {}), static_cast<std::size_t>(std::pow(3, k)));
  }
}

TEST(Adjacent, BinarySearchHitsExactlyNonEmptyCells) {
  const auto d = genUniform(300, 3, 8);
  const auto gp = GridParams::fromData(d, 0.15f, 3);
  const auto g = buildIndex(d, gp, 0);
  std::set<CellId> nonEmpty(g.cellIds.begin(), g.cellIds.end());
  for (CellId id = 0; id < gp.widths[0] * gp.strides[0]; ++id) {
    EXPECT_EQ(g.find(id).has_value(), nonEmpty.count(id) == 1);
  }
}

TEST(Adjacent, CompletenessAgainstBruteNeighborhood) {
  // Any pair within eps in full space lies in adjacent cells of the k-grid.
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto d = genExponential(250, 6, 40.0, seed);
    const float eps = 0.03f + 0.01f * static_cast<float>(seed % 4);
    const auto pairs = fixtures::nestedLoop(d, eps);
    for (std::size_t k = 2; k <= 6; ++k) {
      const auto gp = GridParams::fromData(d, eps, k);
      const auto g = buildIndex(d, gp, defaultUDim(k, 6));
      for (auto [a, b] : pairs) {
        const auto ca = cellCoords(d.point(a), gp), cb = cellCoords(d.point(b), gp);
        for (std::size_t j = 0; j < k; ++j) {
          ASSERT_LE(std::max(ca[j], cb[j]) - std::min(ca[j], cb[j]), 1u);
        }
        bool seen = false;
        for (auto h : adjacentNonEmpty(ca, g, gp)) seen |= g.cellIds[h] == linearize(cb, gp);
        ASSERT_TRUE(seen);
      }
    }
  }
}

TEST(SearchLoss, ReferenceValues) {
  EXPECT_NEAR(searchLoss(5, 3), 216.0 / 243.0, 1e-15);
  EXPECT_NEAR(searchLoss(5, 3), 0.889, 5e-4);
  EXPECT_DOUBLE_EQ(searchLoss(6, 2), (729.0 - 9.0) / 729.0);
  for (std::size_t n = 2; n <= 10; ++n) EXPECT_EQ(searchLoss(n, n), 0.0);
  EXPECT_THROW(searchLoss(3, 4), InvalidArgument);
}

TEST(DefaultUDim, FirstUnindexedDimension) {
  EXPECT_EQ(defaultUDim(6, 16), 6u);
  EXPECT_EQ(defaultUDim(4, 4), 0u);
}
