#ifndef SCATTER_TEST_SUPPORT_HPP
#define SCATTER_TEST_SUPPORT_HPP

#include <cmath>
#include <complex>
#include <vector>

#include "scatter/deeponet.hpp"
#include "scatter/net.hpp"
#include "scatter/rng.hpp"

namespace scatter::test {

// Hand-rolled generators for property tests: every case derives from a
// fixed seed so failures reproduce.
inline Rng seeded(std::uint64_t case_id, std::uint64_t salt = 0) {
  return Rng(mix_seed({0x7e57ULL, case_id, salt}));
}

inline Vec2 random_point(Rng &rng, double lo = 0.0, double hi = 1.0) {
  const double x = uniform(rng, lo, hi);
  return {x, uniform(rng, lo, hi)};
}

inline ResNetPlan tiny_plan(int input_dim, int output_dim, double omega = 1.0,
                            int width = 8, int blocks = 1) {
  ResNetPlan p;
  p.input_dim = input_dim;
  p.width = width;
  p.n_blocks = blocks;
  p.layers_per_block = 3;
  p.output_dim = output_dim;
  p.first_omega = omega;
  return p;
}

// Fills every parameter array with N(0, scale^2)-ish uniform noise.
inline ResNetParams random_direction(const ResNetPlan &plan, Rng &rng,
                                     double scale = 1.0) {
  ResNetParams d = ResNetParams::zeros(plan);
  d.for_each_array([&](const std::string &, auto v) {
    for (auto &x : v)
      x = uniform(rng, -scale, scale);
  });
  return d;
}

inline ResNetParams shifted(const ResNetParams &p, double s,
                            const ResNetParams &dir) {
  ResNetParams out = p;
  axpy(s, dir, out);
  return out;
}

inline double rel_err(double a, double b, double floor = 1e-300) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double rel_err(std::complex<double> a, std::complex<double> b,
                      double floor = 1e-300) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

} // namespace scatter::test

#endif // SCATTER_TEST_SUPPORT_HPP
