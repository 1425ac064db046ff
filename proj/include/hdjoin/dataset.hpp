#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "hdjoin/common.hpp"

namespace hdjoin {

/// Dense row-major point set. Immutable once constructed.
struct Dataset {
  std::vector<float> points;
  std::size_t count = 0;
  std::size_t dims = 0;
  /// perm[j] is the original dimension stored at position j.
  std::vector<std::size_t> perm;

  /// Validates shape and attaches the identity permutation.
  static Dataset fromRows(std::vector<float> coords, std::size_t dims);

  std::span<const float> point(std::size_t i) const {
    return {points.data() + i * dims, dims};
  }
  float at(std::size_t i, std::size_t j) const { return points[i * dims + j]; }
};

struct DimStats {
  std::vector<double> variance;
  double sampleFraction = 1.0;
};

enum class Format { Csv, F32Binary };

Dataset parseCsv(std::istream& in, std::size_t dims);
Dataset parseF32(std::span<const std::byte> bytes, std::size_t dims);
Dataset importDataset(const std::filesystem::path& path, Format format, std::size_t dims);

void writeCsv(std::ostream& out, const Dataset& d);
void writeF32(std::ostream& out, const Dataset& d);

/// Min-max scales each dimension into [0,1]; constant dimensions become 0.
Dataset normalize(const Dataset& d);

/// i.i.d. exponential(lambda) coordinates; draws above 1 are redrawn.
Dataset genExponential(std::size_t count, std::size_t dims, double lambda, std::uint64_t seed);
/// i.i.d. uniform [0,1) coordinates.
Dataset genUniform(std::size_t count, std::size_t dims, std::uint64_t seed);

/// Per-dimension sample variance (n-1 denominator) over ceil(fraction*count)
/// points drawn without replacement.
DimStats estimateVariance(const Dataset& d, double fraction, std::uint64_t seed);

/// Dimension order by descending variance, ties to the lower index.
std::vector<std::size_t> varianceOrder(const DimStats& s);

/// Permutes dimensions into descending-variance order and records it in perm.
Dataset reorderByVariance(const Dataset& d, const DimStats& s);

}  // namespace hdjoin
