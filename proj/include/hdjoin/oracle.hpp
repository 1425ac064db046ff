#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hdjoin/batch_engine.hpp"
#include "hdjoin/dataset.hpp"

namespace hdjoin {

/// Ordered (a, b) pairs, sorted lexicographically.
using OraclePairs = std::vector<std::pair<PointId, PointId>>;

inline constexpr std::size_t kOracleMaxPoints = 100'000;

/// Nested-loop self-join: every ordered pair with sum_j (a_j - b_j)^2 <= eps^2,
/// accumulated in float in stored dimension order. Throws above kOracleMaxPoints.
OraclePairs bruteJoin(const Dataset& d, float epsilon, unsigned workers = 1);

/// Sorted pair list of a neighbor table, for set comparison.
OraclePairs sortedPairs(const NeighborTable& table);

/// Neighbor table view of oracle pairs, for the shared dump formats.
NeighborTable toTable(const OraclePairs& pairs, std::size_t pointCount);

}  // namespace hdjoin
