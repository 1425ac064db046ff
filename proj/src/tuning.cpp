#include "hdjoin/tuning.hpp"

#include <cmath>
#include <ostream>

#include "hdjoin/batch_engine.hpp"

namespace hdjoin {

double searchOpsModel(std::uint64_t pointCount, std::size_t k, std::uint64_t nonEmptyCells) {
  return static_cast<double>(pointCount) * std::pow(3.0, static_cast<double>(k)) *
         std::log2(static_cast<double>(nonEmptyCells));
}

std::vector<KCostProfile> profileK(const Dataset& d, float epsilon, KernelFlags flags,
                                   std::span<const std::size_t> kRange, double fraction,
                                   std::uint64_t seed, unsigned workers) {
  const auto cfg = KernelConfig::make(epsilon, flags);
  std::vector<KCostProfile> out;
  out.reserve(kRange.size());
  for (std::size_t k : kRange) {
    const auto gp = GridParams::fromData(d, epsilon, k);
    const auto g = buildIndex(d, gp, defaultUDim(k, d.dims));
    const auto est = estimateResultSize(d, g, gp, cfg, fraction, seed, workers);
    KCostProfile p;
    p.k = k;
    p.nonEmptyCells = g.nonEmptyCount();
    p.sampledComparisons = est.comparisons;
    p.searchOps = searchOpsModel(d.count, k, p.nonEmptyCells);
    p.compareOps = static_cast<double>(est.comparisons) * (1.0 / fraction);
    out.push_back(p);
  }
  return out;
}

std::size_t selectK(std::span<const KCostProfile> profiles) {
  if (profiles.empty()) throw InvalidArgument("selectK needs at least one profile");
  const KCostProfile* best = &profiles[0];
  for (const auto& p : profiles) {
    if (p.total() < best->total() || (p.total() == best->total() && p.k < best->k)) best = &p;
  }
  return best->k;
}

void writeCostCsv(std::ostream& out, std::span<const KCostProfile> profiles) {
  out << "k,searchOps,compareOps,nonEmptyCells\n";
  for (const auto& p : profiles) {
    out << p.k << ',' << p.searchOps << ',' << p.compareOps << ',' << p.nonEmptyCells << '\n';
  }
}

}  // namespace hdjoin
