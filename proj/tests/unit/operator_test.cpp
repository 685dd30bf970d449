#include <doctest.h>

#include <chrono>

#include <Eigen/QR>

#include "scatter/deeponet.hpp"
#include "support.hpp"

using namespace scatter;
using scatter::test::rel_err;

namespace {

OperatorParams full_operator(std::uint64_t seed) {
  Rng rng = test::seeded(seed);
  return init_operator(rng);
}

Eigen::VectorXd random_beta(Rng &rng) {
  Eigen::VectorXd b(2 * kBasisSize);
  for (auto &x : b)
    x = uniform(rng, -1.0, 1.0);
  return b;
}

} // namespace

TEST_CASE("branch input normalization") {
  const OperatorParams p = full_operator(40);
  ShapeVector v;
  v.cx.fill(0.05);
  v.cy.fill(0.15);
  const Eigen::VectorXd in = branch_input(p, v);
  REQUIRE(in.size() == 16);
  for (int i = 0; i < 8; ++i) {
    CHECK(in[i] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(in[8 + i] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("prediction combines branch and trunk") {
  const OperatorParams p = full_operator(41);
  Rng rng = test::seeded(41, 1);
  const ShapeVector v = random_shape(rng);
  const Vec2 x = test::random_point(rng);

  SUBCASE("unit branch vector selects a trunk output") {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(2 * kBasisSize);
    beta[0] = 1.0;
    Eigen::VectorXd in(2);
    in << x.x, x.y;
    const Eigen::VectorXd tau = forward(p.trunk, in);
    const Complex g = predict_with_branch(p, beta, x);
    CHECK(g.real() == tau[0]);
    CHECK(g.imag() == 0.0);
  }
  SUBCASE("explicit summation oracle") {
    Eigen::VectorXd in(2);
    in << x.x, x.y;
    const Eigen::VectorXd tau = forward(p.trunk, in);
    const Eigen::VectorXd beta = forward(p.branch, branch_input(p, v));
    double re = 0.0, im = 0.0;
    for (int j = 0; j < kBasisSize; ++j) {
      re += beta[j] * tau[j];
      im += beta[kBasisSize + j] * tau[kBasisSize + j];
    }
    const Complex g = predict(p, v, x);
    CHECK(rel_err(g, Complex(re, im)) <= 1e-14);
  }
  SUBCASE("bilinear in the branch output") {
    const Eigen::VectorXd a = random_beta(rng), b = random_beta(rng);
    const Complex ga = predict_with_branch(p, a, x);
    const Complex gb = predict_with_branch(p, b, x);
    CHECK(rel_err(predict_with_branch(p, a + b, x), ga + gb) <= 1e-12);
    CHECK(rel_err(predict_with_branch(p, 3.0 * a, x), 3.0 * ga) <= 1e-14);
    const FieldJet ja = predict_jet_with_branch(p, a, x);
    const FieldJet jb = predict_jet_with_branch(p, b, x);
    CHECK(rel_err(predict_jet_with_branch(p, a + b, x).laplacian, ja.laplacian + jb.laplacian) <=
          1e-12);
  }
}

TEST_CASE("prediction jets") {
  const OperatorParams p = full_operator(42);
  Rng rng = test::seeded(42, 1);
  for (int t = 0; t < 20; ++t) {
    const ShapeVector v = random_shape(rng);
    const Vec2 x = test::random_point(rng, 0.05, 0.95);
    const FieldJet j = predict_jet(p, v, x);
    CHECK(j.value == predict(p, v, x));

    // Richardson-extrapolated five-point Laplacian.
    auto lap = [&](double h) {
      return (predict(p, v, {x.x + h, x.y}) + predict(p, v, {x.x - h, x.y}) +
              predict(p, v, {x.x, x.y + h}) + predict(p, v, {x.x, x.y - h}) -
              4.0 * predict(p, v, x)) / (h * h);
    };
    const Complex fd = (4.0 * lap(5e-5) - lap(1e-4)) / 3.0;
    CHECK(rel_err(j.laplacian, fd) <= 1e-4);
    const double h = 1e-6;
    const Complex dx = (predict(p, v, {x.x + h, x.y}) - predict(p, v, {x.x - h, x.y})) / (2 * h);
    CHECK(rel_err(j.dx, dx) <= 1e-5);
  }
}

TEST_CASE("batched jets and fields") {
  const OperatorParams p = full_operator(43);
  Rng rng = test::seeded(43, 1);
  const ShapeVector v = random_shape(rng);
  const Eigen::VectorXd beta = branch_coefficients(p, v);
  std::vector<Vec2> pts;
  for (int t = 0; t < 40; ++t)
    pts.push_back(test::random_point(rng));

  const auto jets = predict_jet_batch(p, beta, pts);
  const ComplexField f = predict_field(p, v, pts);
  REQUIRE(jets.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const FieldJet one = predict_jet_with_branch(p, beta, pts[i]);
    CHECK(rel_err(jets[i].value, one.value) <= 1e-13);
    CHECK(rel_err(jets[i].laplacian, one.laplacian) <= 1e-12);
    // Scale by the term magnitudes: the dot products cancel heavily.
    Eigen::VectorXd in(2);
    in << pts[i].x, pts[i].y;
    const double scale = beta.cwiseAbs().dot(forward(p.trunk, in).cwiseAbs());
    CHECK(std::abs(f.values[i] - predict(p, v, pts[i])) <= 1e-14 * scale);
  }

  SUBCASE("grid masks the scatterer") {
    const ComplexField g = predict_grid(p, v, 100);
    REQUIRE(g.size() == 10000);
    const ShapeRegion region(shape_from_vector(v));
    std::size_t masked = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(g.masked(i) == region.contains(g.points[i]));
      masked += g.masked(i) ? 1 : 0;
    }
    CHECK(masked > 0);
    CHECK(g.valid_count() == 10000 - masked);
  }
  SUBCASE("prediction lies in the span of the trunk basis") {
    // Real parts over 200 points are combinations of 100 trunk outputs.
    Eigen::MatrixXd m(200, 2);
    Eigen::MatrixXd tau(200, kBasisSize);
    const ShapeVector other = random_shape(rng);
    for (int i = 0; i < 200; ++i) {
      const Vec2 x = test::random_point(rng);
      Eigen::VectorXd in(2);
      in << x.x, x.y;
      tau.row(i) = forward(p.trunk, in).head(kBasisSize).transpose();
      m(i, 0) = predict(p, v, x).real();
      m(i, 1) = predict(p, other, x).real();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(tau);
    CHECK(qr.rank() <= kBasisSize);
    const Eigen::MatrixXd coef = qr.solve(m);
    CHECK((tau * coef - m).norm() <= 1e-9 * m.norm());
  }
}

TEST_CASE("branch cache") {
  const OperatorParams p = full_operator(44);
  Rng rng = test::seeded(44, 1);
  BranchCache cache(4);
  std::vector<ShapeVector> shapes;
  for (int i = 0; i < 6; ++i)
    shapes.push_back(random_shape(rng));

  const Eigen::VectorXd direct = branch_coefficients(p, shapes[0]);
  CHECK(cache.get(p, shapes[0]) == direct);
  CHECK(cache.get(p, shapes[0]) == direct);
  CHECK(cache.hits() == 1);
  for (int i = 1; i < 6; ++i)
    cache.get(p, shapes[i]);
  CHECK(cache.size() == 4);
  // shapes[0] and shapes[1] were evicted as least recently used.
  const std::size_t before = cache.hits();
  cache.get(p, shapes[5]);
  CHECK(cache.hits() == before + 1);
  cache.get(p, shapes[0]);
  CHECK(cache.hits() == before + 1);
  cache.clear();
  CHECK(cache.size() == 0);

  SUBCASE("cached branch speeds up repeated evaluation") {
    BranchCache c;
    const Vec2 x{0.2, 0.3};
    using Clock = std::chrono::steady_clock;
    auto run = [&] {
      const auto t0 = Clock::now();
      Complex acc = 0.0;
      for (int i = 0; i < 300; ++i)
        acc += predict(p, shapes[1], x, &c);
      return std::make_pair(std::chrono::duration<double>(Clock::now() - t0).count(), acc);
    };
    const auto t0 = Clock::now();
    Complex uncached = 0.0;
    for (int i = 0; i < 300; ++i)
      uncached += predict(p, shapes[1], x);
    const double slow = std::chrono::duration<double>(Clock::now() - t0).count();
    const auto [fast, acc] = run();
    CHECK(acc == uncached);
    CHECK(slow >= 1.5 * fast);
  }
}
