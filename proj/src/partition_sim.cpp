#include "hdjoin/partition_sim.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "hdjoin/grid_index.hpp"
#include "hdjoin/parallel.hpp"

namespace hdjoin {

namespace {

void validate(const PartitionConfig& cfg) {
  if (cfg.numNodes == 0) throw InvalidArgument("need at least one node");
  if (cfg.numQueryBatches == 0 || cfg.numQueryBatches % cfg.numNodes != 0) {
    throw InvalidArgument("query batch count " + std::to_string(cfg.numQueryBatches) +
                          " must be a positive multiple of node count " + std::to_string(cfg.numNodes));
  }
}

/// Sorts pairs by query id, keeping each query's emission order, and packs them.
NeighborTable assemble(std::vector<std::pair<PointId, PointId>> pairs, std::size_t count, bool sortNeighbors) {
  if (sortNeighbors) {
    std::sort(pairs.begin(), pairs.end());
  } else {
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  NeighborTable table;
  PairBuffer buf;
  buf.pairs = std::move(pairs);
  appendBatch(table, buf, {0, static_cast<PointId>(count)});
  return table;
}

}  // namespace

std::vector<std::vector<PointId>> entityStripes(std::size_t count, std::size_t parts, std::uint64_t seed) {
  if (parts == 0) throw InvalidArgument("need at least one stripe");
  const auto ids = shuffledPrefix(count, count, seed);
  const std::size_t size = (count + parts - 1) / parts;
  std::vector<std::vector<PointId>> stripes(parts);
  for (std::size_t s = 0; s < parts; ++s) {
    const std::size_t b = std::min(count, s * size), e = std::min(count, (s + 1) * size);
    stripes[s].assign(ids.begin() + b, ids.begin() + e);
  }
  return stripes;
}

std::vector<std::vector<std::size_t>> assignBatches(const PartitionConfig& cfg) {
  validate(cfg);
  std::vector<std::vector<std::size_t>> nodes(cfg.numNodes);
  for (std::size_t l = 0; l < cfg.numQueryBatches; ++l) nodes[l % cfg.numNodes].push_back(l);
  return nodes;
}

PartitionRun runReplicated(const Dataset& d, const PartitionConfig& cfg, const JoinParams& params) {
  const auto assignment = assignBatches(cfg);
  const auto gp = GridParams::fromData(d, params.epsilon, params.k);
  const auto g = buildIndex(d, gp, defaultUDim(params.k, d.dims));
  const auto kc = KernelConfig::make(params.epsilon, params.flags);
  const auto batches = entityStripes(d.count, cfg.numQueryBatches, params.seed);

  std::vector<KernelOutput> outputs(cfg.numQueryBatches);
  parallelChunks(cfg.numNodes, cfg.numNodes, params.workers, [&](std::size_t node, std::size_t, std::size_t) {
    for (std::size_t l : assignment[node]) outputs[l] = runKernel(std::span<const PointId>(batches[l]), d, g, gp, kc);
  });

  PartitionRun run;
  auto& trace = run.trace;
  trace.perNode.resize(cfg.numNodes);
  std::vector<std::pair<PointId, PointId>> all;
  for (std::size_t l = 0; l < cfg.numQueryBatches; ++l) {
    const std::size_t node = l % cfg.numNodes;
    const auto& out = outputs[l];
    trace.perBatch.push_back({node, l, batches[l].size(), out.counters.distanceTests, out.buffer.count()});
    trace.perNode[node].distanceTests += out.counters.distanceTests;
    trace.perNode[node].pairs += out.buffer.count();
    all.insert(all.end(), out.buffer.pairs.begin(), out.buffer.pairs.end());
  }
  run.table = assemble(std::move(all), d.count, false);
  return run;
}

PartitionRun runRing(const Dataset& d, const PartitionConfig& cfg, const JoinParams& params) {
  validate(cfg);
  const std::size_t p = cfg.numNodes;
  const std::size_t perNode = cfg.numQueryBatches / p;
  // Grid geometry comes from global bounds so every stripe index is compatible.
  const auto gp = GridParams::fromData(d, params.epsilon, params.k);
  const auto kc = KernelConfig::make(params.epsilon, params.flags);
  const std::size_t uDim = defaultUDim(params.k, d.dims);
  const auto stripes = entityStripes(d.count, p, params.seed);

  std::vector<GridIndex> entryIndex(p);
  parallelChunks(p, p, params.workers, [&](std::size_t s, std::size_t, std::size_t) {
    entryIndex[s] = buildIndex(d, gp, uDim, stripes[s]);
  });

  // Node k's query stripe is cut into perNode batches for work accounting.
  std::vector<std::vector<std::span<const PointId>>> nodeBatches(p);
  for (std::size_t k = 0; k < p; ++k) {
    const auto& q = stripes[k];
    for (std::size_t b = 0; b < perNode; ++b) {
      const std::size_t lo = q.size() * b / perNode, hi = q.size() * (b + 1) / perNode;
      nodeBatches[k].emplace_back(q.data() + lo, hi - lo);
    }
  }

  PartitionRun run;
  auto& trace = run.trace;
  trace.perNode.resize(p);
  std::vector<std::vector<WorkCounters>> batchWork(p, std::vector<WorkCounters>(perNode));
  std::vector<std::vector<std::uint64_t>> batchPairs(p, std::vector<std::uint64_t>(perNode, 0));
  std::vector<std::vector<std::pair<PointId, PointId>>> nodePairs(p);

  for (std::size_t round = 0; round < p; ++round) {
    if (round > 0) {
      // Each node forwards the entry stripe it processed last round.
      double slowest = 0.0;
      for (std::size_t k = 0; k < p; ++k) {
        const std::size_t held = (k + p - (round - 1)) % p;
        const std::uint64_t elements = stripes[held].size();
        trace.perRoundComm.push_back({round, k, (k + 1) % p, elements});
        trace.perNode[k].sent += elements;
        trace.perNode[(k + 1) % p].received += elements;
        trace.totalComm += elements;
        const double bytes = static_cast<double>(elements * d.dims * sizeof(float));
        slowest = std::max(slowest, params.comm.latency + bytes / params.comm.bandwidth);
      }
      trace.roundTimes.push_back(slowest);
      trace.commTime += slowest;
    }
    parallelChunks(p, p, params.workers, [&](std::size_t k, std::size_t, std::size_t) {
      const auto& entries = entryIndex[(k + p - round) % p];
      for (std::size_t b = 0; b < perNode; ++b) {
        auto out = runKernel(nodeBatches[k][b], d, entries, gp, kc);
        batchWork[k][b] += out.counters;
        batchPairs[k][b] += out.buffer.count();
        nodePairs[k].insert(nodePairs[k].end(), out.buffer.pairs.begin(), out.buffer.pairs.end());
      }
    });
  }

  std::vector<std::pair<PointId, PointId>> all;
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t b = 0; b < perNode; ++b) {
      trace.perBatch.push_back({k, k + b * p, nodeBatches[k][b].size(), batchWork[k][b].distanceTests,
                                batchPairs[k][b]});
      trace.perNode[k].distanceTests += batchWork[k][b].distanceTests;
      trace.perNode[k].pairs += batchPairs[k][b];
    }
    all.insert(all.end(), nodePairs[k].begin(), nodePairs[k].end());
  }
  std::sort(trace.perBatch.begin(), trace.perBatch.end(),
            [](const BatchWork& a, const BatchWork& b) { return a.batch < b.batch; });
  run.table = assemble(std::move(all), d.count, true);
  return run;
}

std::vector<SpeedupRow> projectSpeedup(std::span<const std::uint64_t> perBatchWork,
                                       std::span<const std::size_t> nodeCounts) {
  auto makespan = [&](std::size_t nodes) {
    std::vector<double> load(nodes, 0.0);
    for (std::size_t l = 0; l < perBatchWork.size(); ++l) load[l % nodes] += static_cast<double>(perBatchWork[l]);
    return *std::max_element(load.begin(), load.end());
  };
  const double serial = makespan(1);
  std::vector<SpeedupRow> rows;
  for (std::size_t nodes : nodeCounts) {
    if (nodes == 0) throw InvalidArgument("node count must be positive");
    const double m = makespan(nodes);
    rows.push_back({nodes, m, m > 0.0 ? serial / m : 0.0});
  }
  return rows;
}

std::vector<SpeedupRow> projectSpeedup(const PartitionTrace& trace, std::span<const std::size_t> nodeCounts) {
  std::vector<std::uint64_t> work;
  work.reserve(trace.perBatch.size());
  for (const auto& b : trace.perBatch) work.push_back(b.distanceTests);
  return projectSpeedup(work, nodeCounts);
}

void writeTraceCsv(std::ostream& out, const PartitionTrace& trace) {
  out << "round,src,dst,elements\n";
  for (const auto& c : trace.perRoundComm) out << c.round << ',' << c.src << ',' << c.dst << ',' << c.elements << '\n';
  out << "\nnode,batch,distanceTests,pairs\n";
  for (const auto& b : trace.perBatch) {
    out << b.node << ',' << b.batch << ',' << b.distanceTests << ',' << b.pairs << '\n';
  }
}

void writeSpeedupCsv(std::ostream& out, std::span<const SpeedupRow> rows) {
  out << "nodes,makespan,speedup\n";
  for (const auto& r : rows) out << r.nodes << ',' << r.makespan << ',' << r.speedup << '\n';
}

}  // namespace hdjoin
