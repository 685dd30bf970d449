#include "scatter/adam.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "scatter/error.hpp"

namespace scatter {

namespace {

template <typename Net> auto arrays_of(Net &branch, Net &trunk) {
  using Span = decltype(std::span(branch.input.weight.data(), 0));
  std::vector<Span> out;
  auto collect = [&out](const std::string &, auto values) { out.push_back(values); };
  branch.for_each_array(collect);
  trunk.for_each_array(collect);
  return out;
}

} // namespace

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw InputDomainError("learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw InputDomainError("Adam betas must lie in [0, 1)");
  if (!(epsilon > 0.0))
    throw InputDomainError("Adam epsilon must be positive");
}

AdamState AdamState::zeros_like(const OperatorParams &params) {
  return {OperatorGradient::zeros_like(params),
          OperatorGradient::zeros_like(params), 0};
}

void adam_update(std::span<double> param, std::span<const double> grad,
                 std::span<double> m, std::span<double> v, std::uint64_t t,
                 const AdamConfig &cfg) {
  if (grad.size() != param.size() || m.size() != param.size() ||
      v.size() != param.size())
    throw InputDomainError("Adam arrays differ in size");
  if (t < 1)
    throw InputDomainError("Adam step counter starts at 1");
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    const double mhat = m[i] / c1;
    const double vhat = v[i] / c2;
    param[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

void adam_step(AdamState &state, OperatorParams &params,
               const OperatorGradient &grad, const AdamConfig &cfg) {
  if (!(params.branch.plan == grad.branch.plan) ||
      !(params.trunk.plan == grad.trunk.plan) ||
      !(params.branch.plan == state.m.branch.plan) ||
      !(params.trunk.plan == state.m.trunk.plan))
    throw InputDomainError("gradient and parameter shapes differ");

  grad.for_each_array([](const std::string &name, auto values) {
    for (double g : values) {
      if (!std::isfinite(g))
        throw TrainingError("non-finite gradient in " + name);
    }
  });

  auto p = arrays_of(params.branch, params.trunk);
  auto m = arrays_of(state.m.branch, state.m.trunk);
  auto v = arrays_of(state.v.branch, state.v.trunk);
  std::vector<std::span<const double>> g;
  grad.for_each_array([&g](const std::string &, auto values) { g.push_back(values); });

  ++state.t;
  for (std::size_t a = 0; a < p.size(); ++a)
    adam_update(p[a], g[a], m[a], v[a], state.t, cfg);
}

} // namespace scatter
