#ifndef SCATTER_PHYSICS_CONFIG_HPP
#define SCATTER_PHYSICS_CONFIG_HPP

#include <cmath>
#include <numbers>

#include "scatter/geometry.hpp"

namespace scatter {

enum class RigidBcMode {
  // dG/dn - i k (e_k . n) e^{-i k.x}: sound-hard total field.
  Projected,
  // dG/dn - i k e^{-i k.x}, without the direction projection.
  Literal,
};

struct PhysicsConfig {
  double frequency = 500.0;   // Hz
  double sound_speed = 343.0; // m/s
  double amplitude = 1.0;     // Pa
  Vec2 direction{1.0, 0.0};   // unit propagation direction of the incident wave
  double w_pde = 1.0;
  double w_inner = 1.0;
  double w_outer = 1.0;
  RigidBcMode rigid_bc = RigidBcMode::Projected;

  double wavenumber() const {
    return 2.0 * std::numbers::pi * frequency / sound_speed;
  }

  // Throws InputDomainError on non-physical values.
  void validate() const;

  friend bool operator==(const PhysicsConfig &, const PhysicsConfig &) = default;
};

} // namespace scatter

#endif // SCATTER_PHYSICS_CONFIG_HPP
