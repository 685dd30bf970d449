#ifndef SCATTER_ADAM_HPP
#define SCATTER_ADAM_HPP

#include <cstdint>
#include <span>

#include "scatter/deeponet.hpp"

namespace scatter {

struct AdamConfig {
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

struct AdamState {
  OperatorGradient m;
  OperatorGradient v;
  std::uint64_t t = 0; // completed steps

  static AdamState zeros_like(const OperatorParams &params);
};

// One bias-corrected Adam update of a flat array; t is the 1-based step.
void adam_update(std::span<double> param, std::span<const double> grad,
                 std::span<double> m, std::span<double> v, std::uint64_t t,
                 const AdamConfig &cfg);

// Checks grad for non-finite entries first and throws TrainingError naming
// the first offending array (e.g. "trunk.block2.layer0.weight"); params and
// state are untouched in that case.
void adam_step(AdamState &state, OperatorParams &params,
               const OperatorGradient &grad, const AdamConfig &cfg);

} // namespace scatter

#endif // SCATTER_ADAM_HPP
