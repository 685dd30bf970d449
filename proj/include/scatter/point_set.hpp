#ifndef SCATTER_POINT_SET_HPP
#define SCATTER_POINT_SET_HPP

#include <cstddef>
#include <vector>

#include "scatter/geometry.hpp"

namespace scatter {

// Training coordinates for one scatterer.
struct PointSet {
  std::vector<Vec2> interior;                // collocation points in the fluid
  std::vector<BoundarySample> inner_boundary; // on the scatterer
  std::vector<BoundarySample> outer_boundary; // on the square's edges
  // Uniform draws consumed to fill `interior` (rejections included).
  std::size_t interior_draws = 0;
};

} // namespace scatter

#endif // SCATTER_POINT_SET_HPP
