#ifndef SCATTER_FDFD_HPP
#define SCATTER_FDFD_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "scatter/deeponet.hpp"
#include "scatter/field.hpp"
#include "scatter/physics_config.hpp"

namespace scatter {

inline constexpr std::size_t kDefaultFdfdGrid = 201;

// Right-hand side of dp/dn + i k p = data on the square boundary.
using OuterData = std::function<Complex(Vec2 x, Vec2 normal)>;

struct FdfdOptions {
  double tolerance = 1e-10; // relative residual after refinement
  int max_refinements = 5;
  // Enforce the rigid condition with incident forcing on solid faces.
  bool rigid_forcing = true;
  OuterData outer_data; // empty means homogeneous
  // Solve the complex-conjugate convention (i -> -i everywhere).
  bool conjugate = false;
};

// Nodes (i*h, j*h), h = 1/(n-1), stored with i fastest.
struct FdfdSolution {
  std::size_t n = 0;
  double h = 0.0;
  std::vector<std::uint8_t> solid;
  std::vector<Complex> values; // NaN on solid nodes
  double residual = 0.0;       // ||A u - b|| / ||b||

  Vec2 node(std::size_t i, std::size_t j) const;
  // Bilinear interpolation; NaN when a contributing corner is solid.
  Complex sample(Vec2 x) const;
  // Fluid nodes only.
  ComplexField field() const;
  ComplexField sample_field(std::span<const Vec2> points) const;
};

// Grid-size floor ceil(2 / (k h_target)) below which a warning is due.
std::size_t fdfd_resolution_floor(const PhysicsConfig &physics,
                                  double h_target = 0.005);

std::vector<std::uint8_t> solid_mask(const ShapeVector &v, std::size_t n);

FdfdSolution fdfd_solve_mask(std::size_t n, std::vector<std::uint8_t> solid,
                             const PhysicsConfig &physics,
                             const FdfdOptions &options = {});

FdfdSolution fdfd_solve(const ShapeVector &v, const PhysicsConfig &physics,
                        std::size_t n = kDefaultFdfdGrid,
                        const FdfdOptions &options = {});

} // namespace scatter

#endif // SCATTER_FDFD_HPP
