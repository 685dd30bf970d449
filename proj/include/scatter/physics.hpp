#ifndef SCATTER_PHYSICS_HPP
#define SCATTER_PHYSICS_HPP

#include <span>

#include "scatter/deeponet.hpp"
#include "scatter/physics_config.hpp"
#include "scatter/point_set.hpp"

namespace scatter {

struct IncidentWave {
  Complex value; // p0 e^{-i k e.x}
  Complex dx;    // -i k e_x p_i
  Complex dy;
};

IncidentWave incident(const PhysicsConfig &cfg, Vec2 x);

// Laplacian(G) + k^2 G.
Complex helmholtz_residual(const FieldJet &jet, const PhysicsConfig &cfg);

// Neumann residual on the scatterer; the forcing depends on cfg.rigid_bc.
// Throws InputDomainError unless |normal| = 1.
Complex rigid_bc_residual(const FieldJet &jet, Vec2 normal, Vec2 x,
                          const PhysicsConfig &cfg);

// dG/dn + i k G on the outer boundary.
Complex impedance_bc_residual(const FieldJet &jet, Vec2 normal,
                              const PhysicsConfig &cfg);

struct ResidualBreakdown {
  double pde = 0.0;
  double inner_bc = 0.0;
  double outer_bc = 0.0;
  double total = 0.0;
};

struct ShapeBatch {
  ShapeVector shape;
  PointSet points;
};

// Mean squared residual moduli, averaged per shape then over shapes.
ResidualBreakdown loss(const OperatorParams &params,
                       std::span<const ShapeBatch> batch,
                       const PhysicsConfig &cfg);

struct LossGradient {
  ResidualBreakdown loss;
  OperatorGradient grad;
};

// Loss plus its exact gradient w.r.t. every branch and trunk parameter.
LossGradient loss_gradient(const OperatorParams &params,
                           std::span<const ShapeBatch> batch,
                           const PhysicsConfig &cfg);

} // namespace scatter

#endif // SCATTER_PHYSICS_HPP
