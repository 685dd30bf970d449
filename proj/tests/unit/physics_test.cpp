#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "scatter/cylinder.hpp"
#include "scatter/dataset.hpp"
#include "scatter/error.hpp"
#include "scatter/physics.hpp"
#include "support.hpp"

using namespace scatter;
using scatter::test::rel_err;

namespace {

const Complex kI(0.0, 1.0);

// Jet of G = a e^{-i k s e.x} for direction e, sign s = +-1.
FieldJet plane_wave_jet(const PhysicsConfig &cfg, Vec2 x, double sign = 1.0,
                        Complex a = 1.0) {
  const double k = cfg.wavenumber();
  const Vec2 e = cfg.direction;
  const Complex g = a * std::exp(-kI * sign * k * dot(e, x));
  FieldJet j;
  j.value = g;
  j.dx = -kI * sign * k * e.x * g;
  j.dy = -kI * sign * k * e.y * g;
  j.laplacian = -k * k * g;
  return j;
}

ShapeBatch random_batch(Rng &rng, std::size_t interior, std::size_t inner,
                        std::size_t outer) {
  ShapeBatch b;
  b.shape = random_shape(rng);
  b.points = sample_points(b.shape, {interior, inner, outer}, rng);
  return b;
}

OperatorParams tiny_operator(std::uint64_t seed) {
  Rng rng = test::seeded(seed);
  return init_operator(rng, test::tiny_plan(16, 200),
                       test::tiny_plan(2, 200, 10.0));
}

double directional_fd(const OperatorParams &p, const OperatorGradient &dir,
                      std::span<const ShapeBatch> batch, const PhysicsConfig &cfg,
                      double h) {
  auto at = [&](double s) {
    OperatorParams q = p;
    axpy(s, dir.branch, q.branch);
    axpy(s, dir.trunk, q.trunk);
    return loss(q, batch, cfg).total;
  };
  return (at(h) - at(-h)) / (2.0 * h);
}

} // namespace

TEST_CASE("wavenumber follows frequency and sound speed") {
  PhysicsConfig cfg;
  CHECK(cfg.wavenumber() == doctest::Approx(2.0 * std::numbers::pi * 500.0 / 343.0).epsilon(1e-12));
  CHECK(cfg.wavenumber() == doctest::Approx(9.1591).epsilon(1e-4));
}

TEST_CASE("incident wave") {
  PhysicsConfig cfg;
  SUBCASE("phase origin") {
    const IncidentWave w = incident(cfg, {0.0, 0.37});
    CHECK(w.value.real() == 1.0);
    CHECK(w.value.imag() == 0.0);
  }
  SUBCASE("unit modulus and finite-difference gradient") {
    Rng rng = test::seeded(1);
    cfg.direction = {0.6, 0.8};
    for (int t = 0; t < 100; ++t) {
      const Vec2 x = test::random_point(rng);
      const IncidentWave w = incident(cfg, x);
      CHECK(std::abs(w.value) == doctest::Approx(1.0).epsilon(1e-14));
      const double h = 1e-6;
      const Complex fx = (incident(cfg, {x.x + h, x.y}).value -
                          incident(cfg, {x.x - h, x.y}).value) / (2 * h);
      const Complex fy = (incident(cfg, {x.x, x.y + h}).value -
                          incident(cfg, {x.x, x.y - h}).value) / (2 * h);
      CHECK(rel_err(fx, w.dx) < 1e-6);
      CHECK(rel_err(fy, w.dy) < 1e-6);
    }
  }
}

TEST_CASE("Helmholtz residual") {
  PhysicsConfig cfg;
  const double k = cfg.wavenumber();
  SUBCASE("plane wave solves it") {
    Rng rng = test::seeded(2);
    for (int t = 0; t < 50; ++t) {
      const Complex r = helmholtz_residual(plane_wave_jet(cfg, test::random_point(rng)), cfg);
      CHECK(std::abs(r) <= 1e-9);
    }
  }
  SUBCASE("zero field") {
    CHECK(std::abs(helmholtz_residual(FieldJet{}, cfg)) == 0.0);
  }
  SUBCASE("cylinder series field") {
    CylinderProblem prob;
    Rng rng = test::seeded(3);
    for (int t = 0; t < 40; ++t) {
      const double r = uniform(rng, 0.13, 0.45);
      const double th = uniform(rng, -std::numbers::pi, std::numbers::pi);
      const FieldJet j = cylinder_scatter(prob, {0.5 + r * std::cos(th), 0.5 + r * std::sin(th)});
      CHECK(std::abs(helmholtz_residual(j, cfg)) <= 1e-6 * k * k * std::abs(j.value));
    }
  }
}

TEST_CASE("rigid boundary residual") {
  PhysicsConfig cfg;
  const double k = cfg.wavenumber();
  const Vec2 x{0.3, 0.7};
  SUBCASE("projection vanishes for a normal orthogonal to the incidence") {
    const Complex r = rigid_bc_residual(FieldJet{}, {0.0, 1.0}, x, cfg);
    CHECK(std::abs(r) == 0.0);
  }
  SUBCASE("normal along the incidence gives k^2 in both modes") {
    for (auto mode : {RigidBcMode::Projected, RigidBcMode::Literal}) {
      cfg.rigid_bc = mode;
      const Complex r = rigid_bc_residual(FieldJet{}, {1.0, 0.0}, x, cfg);
      CHECK(std::norm(r) == doctest::Approx(k * k).epsilon(1e-12));
      CHECK(std::norm(r) == doctest::Approx(83.89).epsilon(1e-3));
    }
  }
  SUBCASE("literal mode ignores the projection") {
    cfg.rigid_bc = RigidBcMode::Literal;
    const Complex r = rigid_bc_residual(FieldJet{}, {0.0, 1.0}, x, cfg);
    CHECK(std::abs(r) == doctest::Approx(k).epsilon(1e-12));
  }
  SUBCASE("doubling the amplitude doubles the forcing") {
    const Vec2 n{0.6, 0.8};
    const Complex r1 = rigid_bc_residual(FieldJet{}, n, x, cfg);
    cfg.amplitude = 2.0;
    const Complex r2 = rigid_bc_residual(FieldJet{}, n, x, cfg);
    CHECK(r2 == 2.0 * r1);
  }
  SUBCASE("non-unit normal is rejected") {
    CHECK_THROWS_AS(rigid_bc_residual(FieldJet{}, {1.0, 1.0}, x, cfg), InputDomainError);
  }
  SUBCASE("cylinder series satisfies the projected condition on the surface") {
    CylinderProblem prob;
    double worst = 0.0;
    for (int t = 0; t < 64; ++t) {
      const double th = 2.0 * std::numbers::pi * t / 64.0;
      const Vec2 n{std::cos(th), std::sin(th)};
      const Vec2 p = kShapeCenter + prob.radius * n;
      worst = std::max(worst, std::abs(rigid_bc_residual(cylinder_scatter(prob, p), n, p, cfg)));
    }
    CHECK(worst <= 1e-4 * k);
  }
}

TEST_CASE("impedance boundary residual") {
  PhysicsConfig cfg;
  const double k = cfg.wavenumber();
  const Vec2 x{1.0, 0.42};
  const Vec2 n{1.0, 0.0};
  CHECK(std::abs(impedance_bc_residual(plane_wave_jet(cfg, x), n, cfg)) <= 1e-12);
  CHECK(std::abs(impedance_bc_residual(FieldJet{}, n, cfg)) == 0.0);
  const FieldJet incoming = plane_wave_jet(cfg, x, -1.0);
  CHECK(std::abs(impedance_bc_residual(incoming, n, cfg)) ==
        doctest::Approx(2.0 * k * std::abs(incoming.value)).epsilon(1e-12));
  CHECK_THROWS_AS(impedance_bc_residual(FieldJet{}, {0.0, 0.5}, cfg), InputDomainError);
}

TEST_CASE("loss of the zero network has a closed form") {
  PhysicsConfig cfg;
  const double k = cfg.wavenumber();
  OperatorParams params;
  params.branch = ResNetParams::zeros(ResNetPlan::branch());
  params.trunk = ResNetParams::zeros(ResNetPlan::trunk());
  Rng rng = test::seeded(4);
  std::vector<ShapeBatch> batch;
  for (int s = 0; s < 3; ++s)
    batch.push_back(random_batch(rng, 50, 40 + 10 * s, 20));

  double expected = 0.0;
  for (const auto &b : batch) {
    double mean = 0.0;
    for (const auto &bs : b.points.inner_boundary) {
      const double c = dot(cfg.direction, bs.outward_normal);
      mean += k * k * c * c;
    }
    expected += mean / static_cast<double>(b.points.inner_boundary.size());
  }
  expected /= static_cast<double>(batch.size());

  const ResidualBreakdown l = loss(params, batch, cfg);
  CHECK(l.pde == 0.0);
  CHECK(l.outer_bc == 0.0);
  CHECK(rel_err(l.inner_bc, expected) <= 1e-10);
  CHECK(l.total == l.inner_bc);
}

TEST_CASE("loss weights and bookkeeping") {
  const OperatorParams params = tiny_operator(5);
  Rng rng = test::seeded(5, 1);
  std::vector<ShapeBatch> batch{random_batch(rng, 30, 12, 12), random_batch(rng, 20, 10, 8)};
  PhysicsConfig cfg;
  cfg.w_inner = 0.5;
  cfg.w_outer = 3.0;
  const ResidualBreakdown base = loss(params, batch, cfg);
  CHECK(base.total == doctest::Approx(base.pde + 0.5 * base.inner_bc + 3.0 * base.outer_bc).epsilon(1e-14));

  PhysicsConfig doubled = cfg;
  doubled.w_pde = 2.0;
  const ResidualBreakdown l2 = loss(params, batch, doubled);
  CHECK(l2.pde == base.pde);
  CHECK(l2.total - base.total == doctest::Approx(base.pde).epsilon(1e-10));

  SUBCASE("permuting points leaves the loss unchanged") {
    std::vector<ShapeBatch> shuffled = batch;
    for (auto &b : shuffled) {
      std::reverse(b.points.interior.begin(), b.points.interior.end());
      std::rotate(b.points.inner_boundary.begin(), b.points.inner_boundary.begin() + 3,
                  b.points.inner_boundary.end());
    }
    const ResidualBreakdown l = loss(params, shuffled, cfg);
    CHECK(rel_err(l.total, base.total) <= 1e-12);
  }
  SUBCASE("bitwise reproducible") {
    const ResidualBreakdown again = loss(params, batch, cfg);
    CHECK(again.total == base.total);
    CHECK(again.pde == base.pde);
  }
  SUBCASE("empty point sets are rejected") {
    std::vector<ShapeBatch> bad = batch;
    bad[1].points.outer_boundary.clear();
    CHECK_THROWS_AS(loss(params, bad, cfg), InputDomainError);
    CHECK_THROWS_AS(loss(params, std::span<const ShapeBatch>{}, cfg), InputDomainError);
  }
}

TEST_CASE("loss gradient matches directional finite differences") {
  PhysicsConfig cfg;
  cfg.w_inner = 0.7;
  cfg.w_outer = 1.3;
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    CAPTURE(trial);
    const OperatorParams params = tiny_operator(100 + trial);
    Rng rng = test::seeded(100 + trial, 1);
    std::vector<ShapeBatch> batch{random_batch(rng, 20, 8, 8), random_batch(rng, 15, 6, 9)};
    const LossGradient lg = loss_gradient(params, batch, cfg);
    CHECK(lg.loss.total == loss(params, batch, cfg).total);

    OperatorGradient dir{test::random_direction(params.branch.plan, rng),
                         test::random_direction(params.trunk.plan, rng)};
    const double analytic = dot(lg.grad.branch, dir.branch) + dot(lg.grad.trunk, dir.trunk);
    const double numeric = directional_fd(params, dir, batch, cfg, 1e-5);
    CHECK(rel_err(analytic, numeric) <= 1e-4);
  }
}

TEST_CASE("batch gradient is the average of per-shape gradients") {
  const OperatorParams params = tiny_operator(7);
  Rng rng = test::seeded(7, 1);
  std::vector<ShapeBatch> batch{random_batch(rng, 25, 10, 10), random_batch(rng, 25, 10, 10)};
  PhysicsConfig cfg;
  const LossGradient both = loss_gradient(params, batch, cfg);
  const LossGradient a = loss_gradient(params, std::span(batch).first(1), cfg);
  const LossGradient b = loss_gradient(params, std::span(batch).last(1), cfg);
  OperatorGradient avg = OperatorGradient::zeros_like(params);
  axpy(0.5, a.grad.branch, avg.branch);
  axpy(0.5, b.grad.branch, avg.branch);
  axpy(0.5, a.grad.trunk, avg.trunk);
  axpy(0.5, b.grad.trunk, avg.trunk);
  axpy(-1.0, both.grad.trunk, avg.trunk);
  axpy(-1.0, both.grad.branch, avg.branch);
  const double diff = std::sqrt(dot(avg.trunk, avg.trunk) + dot(avg.branch, avg.branch));
  const double scale = std::sqrt(dot(both.grad.trunk, both.grad.trunk) +
                                 dot(both.grad.branch, both.grad.branch));
  CHECK(diff <= 1e-12 * scale);
}

TEST_CASE("gradient vanishes at a minimizer") {
  // With the inner term switched off, G = 0 attains the minimum 0.
  OperatorParams params;
  params.branch = ResNetParams::zeros(test::tiny_plan(16, 200));
  params.trunk = ResNetParams::zeros(test::tiny_plan(2, 200, 10.0));
  PhysicsConfig cfg;
  cfg.w_inner = 0.0;
  Rng rng = test::seeded(8);
  std::vector<ShapeBatch> batch{random_batch(rng, 20, 10, 10)};
  const LossGradient lg = loss_gradient(params, batch, cfg);
  CHECK(lg.loss.total == 0.0);
  const double g = std::sqrt(dot(lg.grad.trunk, lg.grad.trunk) + dot(lg.grad.branch, lg.grad.branch));
  CHECK(g <= 1e-8);
}
