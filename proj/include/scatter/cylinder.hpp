#ifndef SCATTER_CYLINDER_HPP
#define SCATTER_CYLINDER_HPP

#include <span>
#include <vector>

#include "scatter/deeponet.hpp"
#include "scatter/field.hpp"
#include "scatter/physics_config.hpp"

namespace scatter {

struct CylinderProblem {
  double radius = 0.12;
  Vec2 center = kShapeCenter;
  PhysicsConfig physics;
  int n_terms = 40;

  // Smallest truncation the series accepts for this problem.
  int min_terms() const;
  void validate() const;
};

// Scattered field of a sound-hard cylinder and its spatial derivatives.
// The series uses outgoing Hankel functions of the second kind, matching
// the e^{-i k e.x} incident wave.
FieldJet cylinder_scatter(const CylinderProblem &prob, Vec2 x);

// Points inside the cylinder come back masked (NaN).
ComplexField cylinder_field(const CylinderProblem &prob,
                            std::span<const Vec2> points);

} // namespace scatter

#endif // SCATTER_CYLINDER_HPP
