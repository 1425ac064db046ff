#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "hdjoin/dataset.hpp"
#include "hdjoin/grid_index.hpp"

namespace hdjoin::fixtures {

/// The 18 points of the 2-D grid illustration, one cell per unit of epsilon.
/// Dimension 0 is the row counted from the top, dimension 1 the column.
inline Dataset figureOnePoints() {
  const std::pair<float, float> drawn[] = {
      {1.8f, 1.8f},  {1.25f, 1.25f}, {0.8f, 4.2f},  {0.2f, 4.5f},   {0.25f, 4.7f}, {1.25f, 5.75f},
      {2.45f, 6.75f}, {2.75f, 6.6f}, {2.2f, 3.7f},  {2.8f, 3.2f},   {2.8f, 3.85f}, {3.6f, 3.85f},
      {3.66f, 3.25f}, {4.36f, 2.15f}, {4.86f, 4.85f}, {6.86f, 2.85f}, {6.76f, 2.65f}, {5.26f, 0.85f}};
  std::vector<float> coords;
  for (auto [x, y] : drawn) {
    coords.push_back(7.0f - y);
    coords.push_back(x);
  }
  return Dataset::fromRows(std::move(coords), 2);
}

inline GridParams figureOneGrid() { return GridParams::withBox(1.0f, 2, 2, {0.0f, 0.0f}, {7, 7}); }

/// Brute-force pair set in original ids, with the kernel's float accumulation.
inline std::vector<std::pair<PointId, PointId>> nestedLoop(const Dataset& d, float eps) {
  std::vector<std::pair<PointId, PointId>> out;
  const float e2 = eps * eps;
  for (PointId a = 0; a < d.count; ++a) {
    for (PointId b = 0; b < d.count; ++b) {
      float s = 0.0f;
      for (std::size_t j = 0; j < d.dims; ++j) {
        const float t = d.at(a, j) - d.at(b, j);
        s += t * t;
      }
      if (s <= e2) out.emplace_back(a, b);
    }
  }
  return out;
}

}  // namespace hdjoin::fixtures
