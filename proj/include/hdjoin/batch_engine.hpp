#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "hdjoin/join_kernel.hpp"

namespace hdjoin {

inline constexpr std::uint64_t kDefaultBatchSize = 100'000'000;
inline constexpr std::size_t kMinBatches = 3;

struct ResultEstimate {
  std::uint64_t estimatedPairs = 0;  // ceil(sampledPairs * |D| / sampleSize)
  std::uint64_t sampledPairs = 0;
  std::uint64_t comparisons = 0;     // distance tests on the sample (mu)
  std::size_t sampleSize = 0;
};

/// Runs the kernel on a seeded uniform sample of ceil(f*|D|) query points and
/// scales the pair count up to |D| queries. Only counts are kept.
ResultEstimate estimateResultSize(const Dataset& d, const GridIndex& g, const GridParams& gp,
                                  const KernelConfig& cfg, double fraction, std::uint64_t seed,
                                  unsigned workers = 1);

struct BatchPlan {
  std::uint64_t estTotalPairs = 0;
  std::uint64_t batchSize = 0;
  std::size_t numBatches = 0;
  std::vector<QueryRange> ranges;
};

/// n_b = max(minBatches, ceil(est / bs)); query ids split into n_b contiguous
/// ranges whose sizes differ by at most one.
BatchPlan planBatches(std::uint64_t est, std::uint64_t batchSize, std::size_t pointCount,
                      std::size_t minBatches = kMinBatches);

/// Per-query adjacency: neighbors of q are neighborIds[offsets[q], offsets[q+1]).
struct NeighborTable {
  std::vector<std::uint64_t> offsets{0};
  std::vector<PointId> neighborIds;

  std::size_t queryCount() const { return offsets.size() - 1; }
  std::uint64_t totalPairs() const { return neighborIds.size(); }
  std::span<const PointId> neighbors(PointId q) const {
    return {neighborIds.data() + offsets[q], neighborIds.data() + offsets[q + 1]};
  }
  bool operator==(const NeighborTable&) const = default;
};

/// Appends a batch's key/value pairs to the table. Keys must continue the
/// table's query sequence; queries without pairs get empty rows.
void appendBatch(NeighborTable& table, const PairBuffer& batch, QueryRange range);

struct PipelineOptions {
  unsigned workers = 1;
  /// A batch emitting more than overflowFactor * batchSize pairs is split and rerun.
  double overflowFactor = 2.0;
  /// Completed kernel buffers allowed in flight ahead of table assembly.
  std::size_t depth = 3;
  /// false runs kernel and assembly strictly one after the other.
  bool overlap = true;
};

struct PipelineStats {
  WorkCounters counters;
  std::size_t batchesRun = 0;
  std::size_t retries = 0;
};

NeighborTable executePipeline(const BatchPlan& plan, const Dataset& d, const GridIndex& g,
                              const GridParams& gp, const KernelConfig& cfg,
                              const PipelineOptions& opts = {}, PipelineStats* stats = nullptr);

/// (|R| - |D|) / |D|
double selectivity(std::uint64_t resultPairs, std::size_t pointCount);
double selectivity(const NeighborTable& table, const Dataset& d);

/// "queryId: n1 n2 ..." one line per query.
void writeTableText(std::ostream& out, const NeighborTable& table);
/// Little-endian u32: queryCount, pairCount, offsets[queryCount+1], ids[pairCount].
void writeTableBinary(std::ostream& out, const NeighborTable& table);
NeighborTable readTableBinary(std::istream& in);

}  // namespace hdjoin
