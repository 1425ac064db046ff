#include "hdjoin/join_kernel.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>

#include "hdjoin/parallel.hpp"

namespace hdjoin {

bool distWithin(std::span<const float> a, std::span<const float> b, const KernelConfig& cfg,
                WorkCounters* counters) {
  const std::size_t n = a.size();
  float sum = 0.0f;
  if (cfg.flags.shortc) {
    for (std::size_t j = 0; j < n; ++j) {
      const float diff = a[j] - b[j];
      sum += diff * diff;
      if (sum > cfg.epsSquared) {
        if (counters) {
          counters->macSteps += j + 1;
          ++counters->shortcExits;
        }
        return false;
      }
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      const float diff = a[j] - b[j];
      sum += diff * diff;
    }
  }
  if (counters) counters->macSteps += n;
  return sum <= cfg.epsSquared;
}

void queryPointInto(PointId pid, const Dataset& d, const GridIndex& g, const GridParams& gp,
                    const KernelConfig& cfg, std::vector<PointId>& out, WorkCounters& counters) {
  const auto p = d.point(pid);
  std::uint64_t cell[64];
  for (std::size_t j = 0; j < gp.k; ++j) cell[j] = axisCell(p[j], gp.origin[j], gp.epsilon, gp.widths[j]);
  const float pu = p[g.uDim];

  counters.cellsProbed += forEachAdjacentNonEmpty(std::span(cell, gp.k), g, gp, [&](std::size_t h) {
    const CellRange r = g.cellRanges[h];
    ++counters.cellsVisited;
    counters.candidatesInCells += r.size();
    std::uint32_t begin = r.begin, end = r.end;
    if (cfg.flags.sortidu) {
      const float* u = g.lookupU.data();
      const float* first = std::partition_point(u + r.begin, u + r.end, [&](float qu) {
        return qu < pu && !withinAlongAxis(pu, qu, cfg.epsSquared);
      });
      begin = static_cast<std::uint32_t>(first - u);
      end = begin;
      while (end < r.end && (u[end] <= pu || withinAlongAxis(pu, u[end], cfg.epsSquared))) ++end;
    }
    for (std::uint32_t i = begin; i < end; ++i) {
      const PointId q = g.pointLookup[i];
      ++counters.distanceTests;
      if (distWithin(p, d.point(q), cfg, &counters)) out.push_back(q);
    }
  });
}

std::vector<PointId> queryPoint(PointId pid, const Dataset& d, const GridIndex& g, const GridParams& gp,
                                const KernelConfig& cfg, WorkCounters* counters) {
  std::vector<PointId> out;
  WorkCounters local;
  queryPointInto(pid, d, g, gp, cfg, out, local);
  if (counters) *counters += local;
  return out;
}

KernelOutput runKernel(std::span<const PointId> queries, const Dataset& d, const GridIndex& g,
                       const GridParams& gp, const KernelConfig& cfg, const KernelExec& exec) {
  const std::size_t chunks = std::min<std::size_t>(queries.size(), std::size_t{8} * std::max(1u, exec.workers));
  std::vector<KernelOutput> parts(chunks);
  std::atomic<std::size_t> emitted{0};
  std::atomic<bool> overflow{false};

  parallelChunks(queries.size(), chunks, exec.workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
    auto& part = parts[c];
    std::vector<PointId> neighbors;
    for (std::size_t i = begin; i < end; ++i) {
      if (overflow.load(std::memory_order_relaxed)) return;
      neighbors.clear();
      queryPointInto(queries[i], d, g, gp, cfg, neighbors, part.counters);
      for (PointId q : neighbors) part.buffer.pairs.emplace_back(queries[i], q);
      const std::size_t total = emitted.fetch_add(neighbors.size(), std::memory_order_relaxed) + neighbors.size();
      if (total > exec.capacity) overflow.store(true, std::memory_order_relaxed);
    }
  });

  KernelOutput out;
  out.overflowed = overflow.load();
  if (out.overflowed) return out;
  std::size_t total = 0;
  for (const auto& part : parts) total += part.buffer.count();
  out.buffer.pairs.reserve(total);
  for (auto& part : parts) {
    out.buffer.pairs.insert(out.buffer.pairs.end(), part.buffer.pairs.begin(), part.buffer.pairs.end());
    out.counters += part.counters;
  }
  return out;
}

KernelOutput runKernel(QueryRange range, const Dataset& d, const GridIndex& g, const GridParams& gp,
                       const KernelConfig& cfg, const KernelExec& exec) {
  std::vector<PointId> ids(range.size());
  std::iota(ids.begin(), ids.end(), range.begin);
  return runKernel(std::span<const PointId>(ids), d, g, gp, cfg, exec);
}

}  // namespace hdjoin
