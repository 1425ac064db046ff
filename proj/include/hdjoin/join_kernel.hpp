#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "hdjoin/common.hpp"
#include "hdjoin/dataset.hpp"
#include "hdjoin/grid_index.hpp"

namespace hdjoin {

struct KernelFlags {
  bool sortidu = false;
  bool shortc = false;
};

struct KernelConfig {
  float epsilon = 0.0f;
  KernelFlags flags;
  float epsSquared = 0.0f;

  static KernelConfig make(float epsilon, KernelFlags flags = {}) {
    return {epsilon, flags, epsilon * epsilon};
  }
};

struct WorkCounters {
  std::uint64_t distanceTests = 0;      // point pairs handed to distWithin
  std::uint64_t macSteps = 0;           // squared-difference accumulations
  std::uint64_t shortcExits = 0;        // distance tests aborted early
  std::uint64_t cellsProbed = 0;        // binary searches over cellIds
  std::uint64_t cellsVisited = 0;       // non-empty adjacent cells scanned
  std::uint64_t candidatesInCells = 0;  // sum of |C_b| over visited cells

  WorkCounters& operator+=(const WorkCounters& o) {
    distanceTests += o.distanceTests;
    macSteps += o.macSteps;
    shortcExits += o.shortcExits;
    cellsProbed += o.cellsProbed;
    cellsVisited += o.cellsVisited;
    candidatesInCells += o.candidatesInCells;
    return *this;
  }
  bool operator==(const WorkCounters&) const = default;
};

/// Key/value result pairs (query, neighbor) in emission order.
struct PairBuffer {
  std::vector<std::pair<PointId, PointId>> pairs;
  std::size_t count() const { return pairs.size(); }
};

/// sum_j (a_j - b_j)^2 <= eps^2, accumulated in float in dimension order.
/// With shortc the loop stops as soon as the running sum exceeds eps^2.
bool distWithin(std::span<const float> a, std::span<const float> b, const KernelConfig& cfg,
                WorkCounters* counters = nullptr);

/// Single-axis form of the distance test: (a - b)^2 <= eps^2 in float.
/// Any pair passing distWithin passes this on every axis.
inline bool withinAlongAxis(float a, float b, float epsSquared) {
  const float diff = a - b;
  return diff * diff <= epsSquared;
}

/// Appends every id within epsilon of `pid` (itself included) to `out`,
/// in adjacent-cell order, then u-order within a cell.
void queryPointInto(PointId pid, const Dataset& d, const GridIndex& g, const GridParams& gp,
                    const KernelConfig& cfg, std::vector<PointId>& out, WorkCounters& counters);

std::vector<PointId> queryPoint(PointId pid, const Dataset& d, const GridIndex& g, const GridParams& gp,
                                const KernelConfig& cfg, WorkCounters* counters = nullptr);

struct QueryRange {
  PointId begin = 0;
  PointId end = 0;
  std::size_t size() const { return end - begin; }
  bool operator==(const QueryRange&) const = default;
};

struct KernelExec {
  unsigned workers = 1;
  /// Pair budget; exceeding it stops the run and sets overflowed.
  std::size_t capacity = std::numeric_limits<std::size_t>::max();
};

struct KernelOutput {
  PairBuffer buffer;
  WorkCounters counters;
  bool overflowed = false;
};

KernelOutput runKernel(QueryRange range, const Dataset& d, const GridIndex& g, const GridParams& gp,
                       const KernelConfig& cfg, const KernelExec& exec = {});
KernelOutput runKernel(std::span<const PointId> queries, const Dataset& d, const GridIndex& g,
                       const GridParams& gp, const KernelConfig& cfg, const KernelExec& exec = {});

}  // namespace hdjoin
