#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hdjoin/common.hpp"
#include "hdjoin/dataset.hpp"

namespace hdjoin {

/// Geometry of an epsilon grid over the first k dimensions.
struct GridParams {
  float epsilon = 0.0f;
  std::size_t k = 0;
  std::size_t n = 0;
  std::vector<float> origin;          // per indexed dimension
  std::vector<std::uint64_t> widths;  // cells per indexed dimension
  std::vector<std::uint64_t> strides; // row-major, last dimension fastest

  /// Origin at the per-dimension data minimum, widths covering the data maximum.
  static GridParams fromData(const Dataset& d, float epsilon, std::size_t k);
  /// Explicit box. Throws IdOverflow if the box has more than 2^64 cells.
  static GridParams withBox(float epsilon, std::size_t k, std::size_t n, std::vector<float> origin,
                            std::vector<std::uint64_t> widths);
};

using CellCoords = std::vector<std::uint64_t>;

/// Cell index of coordinate x along one indexed axis. Boundary values go to
/// the higher cell; values past either edge clamp into the box.
inline std::uint64_t axisCell(float x, float origin, float epsilon, std::uint64_t width) {
  const double c = std::floor((static_cast<double>(x) - origin) / epsilon);
  if (!(c > 0.0)) return 0;
  if (c >= static_cast<double>(width - 1)) return width - 1;
  return static_cast<std::uint64_t>(c);
}

/// floor((x_j - origin_j) / epsilon), clamped into the grid box.
CellCoords cellCoords(std::span<const float> p, const GridParams& gp);
CellId linearize(std::span<const std::uint64_t> c, const GridParams& gp);
CellCoords delinearize(CellId id, const GridParams& gp);

struct CellRange {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  std::uint32_t size() const { return end - begin; }
};

/// Sparse grid: only non-empty cells are stored.
struct GridIndex {
  std::vector<CellId> cellIds;        // strictly increasing
  std::vector<CellRange> cellRanges;  // parallel to cellIds, into pointLookup
  std::vector<PointId> pointLookup;   // grouped by cell, sorted by u within a cell
  std::vector<float> lookupU;         // u coordinate of pointLookup[i]
  std::size_t uDim = 0;

  std::size_t nonEmptyCount() const { return cellIds.size(); }

  /// Binary search for a cell; returns its handle (position in cellIds).
  std::optional<std::size_t> find(CellId id) const {
    auto it = std::lower_bound(cellIds.begin(), cellIds.end(), id);
    if (it == cellIds.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - cellIds.begin());
  }
};

/// The highest-variance un-indexed dimension when k < n, else dimension 0.
inline std::size_t defaultUDim(std::size_t k, std::size_t n) { return k < n ? k : 0; }

GridIndex buildIndex(const Dataset& d, const GridParams& gp, std::size_t uDim);
/// Index over a subset of points; lookup entries keep their dataset ids.
GridIndex buildIndex(const Dataset& d, const GridParams& gp, std::size_t uDim,
                     std::span<const PointId> subset);

/// Calls fn(handle) for each non-empty cell in the {-1,0,+1}^k box around c,
/// in row-major offset order. Returns the number of in-grid candidates probed.
template <class Fn>
std::size_t forEachAdjacentNonEmpty(std::span<const std::uint64_t> c, const GridIndex& g,
                                    const GridParams& gp, Fn&& fn) {
  const std::size_t k = gp.k;
  // Per dimension, the admissible offset interval [lo, hi] within {-1, 0, 1}.
  std::uint64_t lo[64], hi[64], cur[64];
  CellId base = 0;
  for (std::size_t j = 0; j < k; ++j) {
    lo[j] = c[j] > 0 ? c[j] - 1 : 0;
    hi[j] = std::min(c[j] + 1, gp.widths[j] - 1);
    cur[j] = lo[j];
    base += lo[j] * gp.strides[j];
  }
  std::size_t probed = 0;
  CellId id = base;
  for (;;) {
    ++probed;
    if (auto h = g.find(id)) fn(*h);
    std::size_t j = k;
    while (j > 0) {
      --j;
      if (cur[j] < hi[j]) {
        ++cur[j];
        id += gp.strides[j];
        break;
      }
      id -= (cur[j] - lo[j]) * gp.strides[j];
      cur[j] = lo[j];
      if (j == 0) return probed;
    }
    if (k == 0) return probed;
  }
}

/// Handles of the non-empty cells adjacent to c (including c).
std::vector<std::size_t> adjacentNonEmpty(std::span<const std::uint64_t> c, const GridIndex& g,
                                          const GridParams& gp);

/// Fraction of the full 3^n neighborhood not searched when indexing k of n dims.
double searchLoss(std::size_t n, std::size_t k);

}  // namespace hdjoin
