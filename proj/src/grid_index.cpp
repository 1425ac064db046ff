#include "hdjoin/grid_index.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace hdjoin {

GridParams GridParams::withBox(float epsilon, std::size_t k, std::size_t n, std::vector<float> origin,
                               std::vector<std::uint64_t> widths) {
  if (!(epsilon > 0.0f) || !std::isfinite(epsilon)) throw InvalidArgument("epsilon must be positive");
  if (k < 2 || k > n) {
    throw InvalidArgument("k=" + std::to_string(k) + " must satisfy 2 <= k <= n=" + std::to_string(n));
  }
  if (k > 64) throw InvalidArgument("at most 64 indexed dimensions are supported");
  if (origin.size() != k || widths.size() != k) throw InvalidArgument("origin/widths must have k entries");

  GridParams gp;
  gp.epsilon = epsilon;
  gp.k = k;
  gp.n = n;
  gp.origin = std::move(origin);
  gp.widths = std::move(widths);
  gp.strides.assign(k, 1);
  std::uint64_t total = 1;
  for (std::size_t j = k; j-- > 0;) {
    if (gp.widths[j] == 0) throw InvalidArgument("grid widths must be >= 1");
    gp.strides[j] = total;
    if (__builtin_mul_overflow(total, gp.widths[j], &total)) {
      throw IdOverflow("grid of k=" + std::to_string(k) +
                       " dimensions overflows 64-bit cell ids; index fewer dimensions");
    }
  }
  return gp;
}

GridParams GridParams::fromData(const Dataset& d, float epsilon, std::size_t k) {
  if (k < 2 || k > d.dims) {
    throw InvalidArgument("k=" + std::to_string(k) + " must satisfy 2 <= k <= n=" + std::to_string(d.dims));
  }
  if (!(epsilon > 0.0f) || !std::isfinite(epsilon)) throw InvalidArgument("epsilon must be positive");
  std::vector<float> origin(k);
  std::vector<std::uint64_t> widths(k);
  for (std::size_t j = 0; j < k; ++j) {
    float lo = d.at(0, j), hi = lo;
    for (std::size_t i = 1; i < d.count; ++i) {
      lo = std::min(lo, d.at(i, j));
      hi = std::max(hi, d.at(i, j));
    }
    origin[j] = lo;
    const double cells = std::floor((static_cast<double>(hi) - lo) / epsilon) + 1.0;
    if (cells >= 0x1.0p63) throw IdOverflow("epsilon too small for the data extent");
    widths[j] = static_cast<std::uint64_t>(cells);
  }
  return withBox(epsilon, k, d.dims, std::move(origin), std::move(widths));
}

CellCoords cellCoords(std::span<const float> p, const GridParams& gp) {
  CellCoords c(gp.k);
  for (std::size_t j = 0; j < gp.k; ++j) c[j] = axisCell(p[j], gp.origin[j], gp.epsilon, gp.widths[j]);
  return c;
}

CellId linearize(std::span<const std::uint64_t> c, const GridParams& gp) {
  CellId id = 0;
  for (std::size_t j = 0; j < gp.k; ++j) id += c[j] * gp.strides[j];
  return id;
}

CellCoords delinearize(CellId id, const GridParams& gp) {
  CellCoords c(gp.k);
  for (std::size_t j = 0; j < gp.k; ++j) {
    c[j] = id / gp.strides[j];
    id %= gp.strides[j];
  }
  return c;
}

GridIndex buildIndex(const Dataset& d, const GridParams& gp, std::size_t uDim) {
  std::vector<PointId> all(d.count);
  std::iota(all.begin(), all.end(), PointId{0});
  return buildIndex(d, gp, uDim, all);
}

GridIndex buildIndex(const Dataset& d, const GridParams& gp, std::size_t uDim,
                     std::span<const PointId> subset) {
  if (uDim >= d.dims) throw InvalidArgument("sort dimension out of range");
  if (gp.n != d.dims) throw DimensionMismatch("grid parameters do not match dataset dims");

  struct Entry {
    CellId cell;
    float u;
    PointId id;
  };
  std::vector<Entry> entries;
  entries.reserve(subset.size());
  std::uint64_t coords[64];
  for (PointId id : subset) {
    const auto p = d.point(id);
    for (std::size_t j = 0; j < gp.k; ++j) coords[j] = axisCell(p[j], gp.origin[j], gp.epsilon, gp.widths[j]);
    entries.push_back({linearize(std::span(coords, gp.k), gp), p[uDim], id});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.cell != b.cell) return a.cell < b.cell;
    if (a.u != b.u) return a.u < b.u;
    return a.id < b.id;
  });

  GridIndex g;
  g.uDim = uDim;
  g.pointLookup.reserve(entries.size());
  g.lookupU.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i == 0 || entries[i].cell != entries[i - 1].cell) {
      if (!g.cellRanges.empty()) g.cellRanges.back().end = static_cast<std::uint32_t>(i);
      g.cellIds.push_back(entries[i].cell);
      g.cellRanges.push_back({static_cast<std::uint32_t>(i), 0});
    }
    g.pointLookup.push_back(entries[i].id);
    g.lookupU.push_back(entries[i].u);
  }
  if (!g.cellRanges.empty()) g.cellRanges.back().end = static_cast<std::uint32_t>(entries.size());
  return g;
}

std::vector<std::size_t> adjacentNonEmpty(std::span<const std::uint64_t> c, const GridIndex& g,
                                          const GridParams& gp) {
  std::vector<std::size_t> out;
  forEachAdjacentNonEmpty(c, g, gp, [&](std::size_t h) { out.push_back(h); });
  return out;
}

double searchLoss(std::size_t n, std::size_t k) {
  if (k < 2 || k > n) throw InvalidArgument("searchLoss requires 2 <= k <= n");
  const double full = std::pow(3.0, static_cast<double>(n));
  return (full - std::pow(3.0, static_cast<double>(k))) / full;
}

}  // namespace hdjoin
