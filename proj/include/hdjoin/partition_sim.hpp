#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "hdjoin/batch_engine.hpp"

namespace hdjoin {

enum class PartitionMode { Replicated, DistributedRing };

struct PartitionConfig {
  std::size_t numNodes = 1;
  std::size_t numQueryBatches = 1;  // N_b, a multiple of numNodes
  PartitionMode mode = PartitionMode::Replicated;
};

/// Synthetic per-message cost: latency + bytes / bandwidth, in seconds.
struct CommModel {
  double latency = 1e-5;
  double bandwidth = 1e10;  // bytes per second
};

struct JoinParams {
  float epsilon = 0.0f;
  std::size_t k = 2;
  KernelFlags flags;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  CommModel comm;
};

struct BatchWork {
  std::size_t node = 0;
  std::size_t batch = 0;
  std::uint64_t queries = 0;
  std::uint64_t distanceTests = 0;
  std::uint64_t pairs = 0;
};

struct CommRecord {
  std::size_t round = 0;
  std::size_t src = 0;
  std::size_t dst = 0;
  std::uint64_t elements = 0;  // points carried
};

struct NodeTotals {
  std::uint64_t distanceTests = 0;
  std::uint64_t pairs = 0;
  std::uint64_t sent = 0;
  std::uint64_t received = 0;
};

struct PartitionTrace {
  std::vector<NodeTotals> perNode;
  std::vector<BatchWork> perBatch;        // ordered by batch index
  std::vector<CommRecord> perRoundComm;   // ordered by round, then source
  std::vector<double> roundTimes;         // t_a for rounds 1..|p|-1
  std::uint64_t totalComm = 0;
  double commTime = 0.0;                  // sum of roundTimes
};

struct PartitionRun {
  PartitionTrace trace;
  NeighborTable table;
};

/// Point ids shuffled with `seed` and cut into `parts` contiguous stripes of
/// ceil(count/parts) points; only the last stripe may be short.
std::vector<std::vector<PointId>> entityStripes(std::size_t count, std::size_t parts, std::uint64_t seed);

/// Round-robin: batch l goes to node l mod |p|.
std::vector<std::vector<std::size_t>> assignBatches(const PartitionConfig& cfg);

/// Every node holds the whole dataset and joins its query batches against it.
PartitionRun runReplicated(const Dataset& d, const PartitionConfig& cfg, const JoinParams& params);

/// Each node owns one entity stripe and forwards the entry stripe it holds to
/// its successor for |p|-1 rounds.
PartitionRun runRing(const Dataset& d, const PartitionConfig& cfg, const JoinParams& params);

struct SpeedupRow {
  std::size_t nodes = 0;
  double makespan = 0.0;
  double speedup = 0.0;
};

/// makespan(|p|) = max over nodes of the work of its round-robin batches.
std::vector<SpeedupRow> projectSpeedup(std::span<const std::uint64_t> perBatchWork,
                                       std::span<const std::size_t> nodeCounts);
std::vector<SpeedupRow> projectSpeedup(const PartitionTrace& trace, std::span<const std::size_t> nodeCounts);

/// CSV sections: round,src,dst,elements then node,batch,distanceTests,pairs.
void writeTraceCsv(std::ostream& out, const PartitionTrace& trace);
void writeSpeedupCsv(std::ostream& out, std::span<const SpeedupRow> rows);

}  // namespace hdjoin
