#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "hdjoin/join_kernel.hpp"

namespace hdjoin {

inline constexpr std::size_t kDefaultK = 6;

/// Memory-operation cost of indexing k dimensions.
struct KCostProfile {
  std::size_t k = 0;
  double searchOps = 0.0;          // |D| * 3^k * log2(|G_k|)
  double compareOps = 0.0;         // mu_k / f
  std::uint64_t nonEmptyCells = 0; // |G_k|
  std::uint64_t sampledComparisons = 0;

  double total() const { return searchOps + compareOps; }
};

double searchOpsModel(std::uint64_t pointCount, std::size_t k, std::uint64_t nonEmptyCells);

/// Builds a k-dimensional index for each k and runs the kernel on a sampled
/// fraction f of the query points to fill both cost terms.
std::vector<KCostProfile> profileK(const Dataset& d, float epsilon, KernelFlags flags,
                                   std::span<const std::size_t> kRange, double fraction,
                                   std::uint64_t seed, unsigned workers = 1);

/// k minimizing searchOps + compareOps; ties go to the smaller k.
std::size_t selectK(std::span<const KCostProfile> profiles);

/// CSV: k,searchOps,compareOps,nonEmptyCells
void writeCostCsv(std::ostream& out, std::span<const KCostProfile> profiles);

}  // namespace hdjoin
