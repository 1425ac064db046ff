#include "hdjoin/oracle.hpp"

#include <algorithm>
#include <string>

#include "hdjoin/parallel.hpp"

namespace hdjoin {

OraclePairs bruteJoin(const Dataset& d, float epsilon, unsigned workers) {
  if (d.count > kOracleMaxPoints) {
    throw InvalidArgument("brute-force join limited to " + std::to_string(kOracleMaxPoints) + " points");
  }
  const float epsSquared = epsilon * epsilon;
  const std::size_t chunks = std::min<std::size_t>(d.count, std::size_t{4} * std::max(1u, workers));
  std::vector<OraclePairs> parts(chunks);
  parallelChunks(d.count, chunks, workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a) {
      const float* pa = d.points.data() + a * d.dims;
      for (std::size_t b = 0; b < d.count; ++b) {
        const float* pb = d.points.data() + b * d.dims;
        float sum = 0.0f;
        for (std::size_t j = 0; j < d.dims; ++j) {
          const float diff = pa[j] - pb[j];
          sum += diff * diff;
        }
        if (sum <= epsSquared) parts[c].emplace_back(static_cast<PointId>(a), static_cast<PointId>(b));
      }
    }
  });
  OraclePairs out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

OraclePairs sortedPairs(const NeighborTable& table) {
  OraclePairs out;
  out.reserve(table.totalPairs());
  for (PointId q = 0; q < table.queryCount(); ++q) {
    for (PointId n : table.neighbors(q)) out.emplace_back(q, n);
  }
  std::sort(out.begin(), out.end());
  return out;
}

NeighborTable toTable(const OraclePairs& pairs, std::size_t pointCount) {
  NeighborTable t;
  t.offsets.reserve(pointCount + 1);
  t.neighborIds.reserve(pairs.size());
  std::size_t i = 0;
  for (std::size_t q = 0; q < pointCount; ++q) {
    for (; i < pairs.size() && pairs[i].first == q; ++i) t.neighborIds.push_back(pairs[i].second);
    t.offsets.push_back(t.neighborIds.size());
  }
  return t;
}

}  // namespace hdjoin
