#include <doctest.h>

#include <cmath>

#include "scatter/error.hpp"
#include "scatter/net.hpp"
#include "support.hpp"

using namespace scatter;
using scatter::test::rel_err;

namespace {

Eigen::VectorXd at(Vec2 x) {
  Eigen::VectorXd v(2);
  v << x.x, x.y;
  return v;
}

Eigen::VectorXd random_vector(Rng &rng, Eigen::Index n, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (auto &x : v)
    x = uniform(rng, -scale, scale);
  return v;
}

// Loss built from the jets of every output: sum of squared Laplacians.
double laplacian_loss(const ResNetParams &p, const std::vector<Vec2> &pts) {
  double s = 0.0;
  for (Vec2 x : pts)
    for (const SpatialJet &j : forward_jet(p, x))
      s += (j.hess[0] + j.hess[2]) * (j.hess[0] + j.hess[2]);
  return s;
}

ResNetParams laplacian_loss_grad(const ResNetParams &p, const std::vector<Vec2> &pts) {
  ResNetParams g = ResNetParams::zeros(p.plan);
  for (Vec2 x : pts) {
    const auto jets = forward_jet(p, x);
    std::vector<SpatialJet> up(jets.size());
    for (std::size_t j = 0; j < jets.size(); ++j) {
      const double lap = jets[j].hess[0] + jets[j].hess[2];
      up[j].hess[0] = 2.0 * lap;
      up[j].hess[2] = 2.0 * lap;
    }
    axpy(1.0, backward_jet(p, x, up), g);
  }
  return g;
}

} // namespace

TEST_CASE("plans and parameter counts") {
  const std::size_t hidden = 5 * 3 * (100 * 100 + 100);
  CHECK(ResNetPlan::branch().parameter_count() == 100 * 16 + 100 + hidden + 200 * 100 + 200);
  CHECK(ResNetPlan::trunk().parameter_count() == 100 * 2 + 100 + hidden + 200 * 100 + 200);
  CHECK(ResNetParams::zeros(ResNetPlan::branch()).count() == ResNetPlan::branch().parameter_count());
  CHECK(ResNetPlan::trunk().first_omega == 10.0);
  CHECK(ResNetPlan::branch().first_omega == 1.0);
  ResNetPlan bad = ResNetPlan::trunk();
  bad.width = 0;
  CHECK_THROWS_AS(bad.validate(), InputDomainError);
}

TEST_CASE("initialization") {
  Rng a = test::seeded(20), b = test::seeded(20);
  const ResNetParams p = init_params(ResNetPlan::trunk(), a);
  const ResNetParams q = init_params(ResNetPlan::trunk(), b);
  CHECK(dot(p, p) == dot(q, q));
  CHECK(p.output.weight == q.output.weight);

  for (const auto &block : p.blocks)
    for (const auto &layer : block) {
      CHECK(layer.weight.cwiseAbs().maxCoeff() < std::sqrt(6.0 / 100.0));
      CHECK(layer.bias.isZero());
    }
  CHECK(p.input.weight.cwiseAbs().maxCoeff() < std::sqrt(6.0 / 2.0));

  // Mean of all weights within 3 sigma of zero.
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  p.for_each_array([&](const std::string &name, auto arr) {
    if (name.find("weight") == std::string::npos)
      return;
    for (double w : arr) {
      sum += w;
      sq += w * w;
      ++n;
    }
  });
  const double sigma = std::sqrt(sq / n);
  CHECK(std::abs(sum / n) <= 3.0 * sigma / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("forward pass") {
  SUBCASE("zero network gives zero") {
    const ResNetParams z = ResNetParams::zeros(ResNetPlan::branch());
    CHECK(forward(z, Eigen::VectorXd::Ones(16)).isZero());
  }
  SUBCASE("zero blocks act as identity") {
    Rng rng = test::seeded(21);
    ResNetParams p = init_params(ResNetPlan::trunk(), rng);
    for (auto &block : p.blocks)
      for (auto &layer : block) {
        layer.weight.setZero();
        layer.bias.setZero();
      }
    const Vec2 x{0.3, 0.8};
    const Eigen::VectorXd h =
        (p.plan.first_omega * (p.input.weight * at(x) + p.input.bias)).array().sin();
    const Eigen::VectorXd expected = p.output.weight * h + p.output.bias;
    CHECK((forward(p, at(x)) - expected).norm() <= 1e-13 * expected.norm());
  }
  SUBCASE("interval bound on the output") {
    Rng rng = test::seeded(22);
    const ResNetParams p = init_params(test::tiny_plan(2, 6, 1.0, 8, 2), rng);
    // Hidden magnitude bound: |sin| <= 1 after the input layer, and each
    // block adds at most the row sums of |W3| plus |b3|.
    Eigen::VectorXd bound = Eigen::VectorXd::Ones(8);
    for (const auto &block : p.blocks)
      bound += block.back().weight.cwiseAbs() * Eigen::VectorXd::Ones(8) +
               block.back().bias.cwiseAbs();
    const Eigen::VectorXd out_bound =
        p.output.weight.cwiseAbs() * bound + p.output.bias.cwiseAbs();
    for (int t = 0; t < 200; ++t) {
      const Eigen::VectorXd y = forward(p, at(test::random_point(rng)));
      for (Eigen::Index j = 0; j < y.size(); ++j)
        CHECK(std::abs(y[j]) <= out_bound[j]);
    }
  }
  SUBCASE("batched forward matches single forward") {
    Rng rng = test::seeded(23);
    const ResNetParams p = init_params(ResNetPlan::trunk(), rng);
    Eigen::MatrixXd xs(2, 17);
    for (Eigen::Index c = 0; c < xs.cols(); ++c)
      xs.col(c) = at(test::random_point(rng));
    const Eigen::MatrixXd ys = forward_batch(p, xs);
    for (Eigen::Index c = 0; c < xs.cols(); ++c)
      CHECK((ys.col(c) - forward(p, xs.col(c))).norm() <= 1e-13 * ys.col(c).norm());
  }
  SUBCASE("deterministic") {
    Rng rng = test::seeded(24);
    const ResNetParams p = init_params(ResNetPlan::branch(), rng);
    const Eigen::VectorXd x = random_vector(rng, 16);
    CHECK(forward(p, x) == forward(p, x));
  }
  SUBCASE("dimension mismatch") {
    const ResNetParams z = ResNetParams::zeros(ResNetPlan::branch());
    CHECK_THROWS_AS(forward(z, Eigen::VectorXd::Ones(3)), InputDomainError);
  }
}

TEST_CASE("forward jets") {
  SUBCASE("single sine layer") {
    ResNetPlan plan = test::tiny_plan(2, 1, 1.0, 1, 0);
    ResNetParams p = ResNetParams::zeros(plan);
    const double a = 1.7, c = -0.4, b = 0.3;
    p.input.weight << a, c;
    p.input.bias << b;
    p.output.weight << 1.0;
    const Vec2 x{0.2, 0.9};
    const double u = a * x.x + c * x.y + b;
    const SpatialJet j = forward_jet(p, x)[0];
    CHECK(j.value == doctest::Approx(std::sin(u)).epsilon(1e-15));
    CHECK(j.grad[0] == doctest::Approx(a * std::cos(u)).epsilon(1e-14));
    CHECK(j.hess[0] == doctest::Approx(-a * a * std::sin(u)).epsilon(1e-14));
    CHECK(j.hess[1] == doctest::Approx(-a * c * std::sin(u)).epsilon(1e-14));
    CHECK(j.hess[2] == doctest::Approx(-c * c * std::sin(u)).epsilon(1e-14));
  }
  SUBCASE("finite differences on random nets") {
    for (int t = 0; t < 20; ++t) {
      Rng rng = test::seeded(25, t);
      const ResNetParams p = init_params(test::tiny_plan(2, 6, 3.0, 16, 2), rng);
      const Vec2 x = test::random_point(rng, 0.1, 0.9);
      const auto jets = forward_jet(p, x);
      const Eigen::VectorXd f0 = forward(p, at(x));
      const double h = 1e-4;
      const Eigen::VectorXd fxp = forward(p, at({x.x + h, x.y}));
      const Eigen::VectorXd fxm = forward(p, at({x.x - h, x.y}));
      const Eigen::VectorXd fyp = forward(p, at({x.x, x.y + h}));
      const Eigen::VectorXd fym = forward(p, at({x.x, x.y - h}));
      const Eigen::VectorXd fpp = forward(p, at({x.x + h, x.y + h}));
      const Eigen::VectorXd fpm = forward(p, at({x.x + h, x.y - h}));
      const Eigen::VectorXd fmp = forward(p, at({x.x - h, x.y + h}));
      const Eigen::VectorXd fmm = forward(p, at({x.x - h, x.y - h}));
      Eigen::VectorXd an(5 * jets.size()), fd(5 * jets.size());
      for (std::size_t j = 0; j < jets.size(); ++j) {
        CHECK(jets[j].value == f0[j]);
        an.segment(5 * j, 5) << jets[j].grad[0], jets[j].grad[1], jets[j].hess[0],
            jets[j].hess[1], jets[j].hess[2];
        fd.segment(5 * j, 5) << (fxp[j] - fxm[j]) / (2 * h), (fyp[j] - fym[j]) / (2 * h),
            (fxp[j] - 2 * f0[j] + fxm[j]) / (h * h),
            (fpp[j] - fpm[j] - fmp[j] + fmm[j]) / (4 * h * h),
            (fyp[j] - 2 * f0[j] + fym[j]) / (h * h);
      }
      CHECK((an - fd).norm() / an.norm() <= 1e-5);
    }
  }
  SUBCASE("batched jets match single-point jets") {
    Rng rng = test::seeded(26);
    const ResNetParams p = init_params(ResNetPlan::trunk(), rng);
    Eigen::Matrix2Xd xs(2, 5);
    for (Eigen::Index c = 0; c < 5; ++c)
      xs.col(c) = at(test::random_point(rng));
    const ChannelBatch batch = forward_jet_batch(p, xs);
    for (Eigen::Index c = 0; c < 5; ++c) {
      const auto jets = forward_jet(p, {xs(0, c), xs(1, c)});
      for (std::size_t j = 0; j < jets.size(); j += 37) {
        const auto row = static_cast<Eigen::Index>(j);
        CHECK(rel_err(batch.channel(0)(row, c), jets[j].value) <= 1e-13);
        CHECK(rel_err(batch.channel(2)(row, c), jets[j].grad[1]) <= 1e-12);
        CHECK(rel_err(batch.channel(5)(row, c), jets[j].hess[2]) <= 1e-12);
      }
    }
  }
  SUBCASE("needs a 2-D input") {
    const ResNetParams z = ResNetParams::zeros(ResNetPlan::branch());
    CHECK_THROWS_AS(forward_jet(z, {0.1, 0.2}), InputDomainError);
  }
}

TEST_CASE("reverse-mode gradients") {
  SUBCASE("output bias gradient is the upstream") {
    Rng rng = test::seeded(27);
    const ResNetParams p = init_params(ResNetPlan::branch(), rng);
    const Eigen::VectorXd x = random_vector(rng, 16);
    const Eigen::VectorXd up = random_vector(rng, 200);
    CHECK(backward(p, x, up).output.bias == up);
    const ResNetParams zero = backward(p, x, Eigen::VectorXd::Zero(200));
    CHECK(dot(zero, zero) == 0.0);
  }
  SUBCASE("directional checks") {
    Rng rng = test::seeded(28);
    const ResNetParams p = init_params(test::tiny_plan(16, 12, 1.0, 24, 2), rng);
    const Eigen::VectorXd x = random_vector(rng, 16);
    const Eigen::VectorXd up = random_vector(rng, 12);
    const ResNetParams g = backward(p, x, up);
    for (int t = 0; t < 20; ++t) {
      const ResNetParams d = test::random_direction(p.plan, rng);
      const double h = 1e-5;
      const double fd = (up.dot(forward(test::shifted(p, h, d), x)) -
                         up.dot(forward(test::shifted(p, -h, d), x))) / (2 * h);
      CHECK(rel_err(dot(g, d), fd) <= 1e-5);
    }
  }
  SUBCASE("value-only jet upstream agrees with backward") {
    Rng rng = test::seeded(29);
    const ResNetParams p = init_params(test::tiny_plan(2, 10, 10.0, 16, 2), rng);
    const Vec2 x = test::random_point(rng);
    const Eigen::VectorXd up = random_vector(rng, 10);
    std::vector<SpatialJet> jets(10);
    for (int j = 0; j < 10; ++j)
      jets[j].value = up[j];
    const ResNetParams a = backward_jet(p, x, jets);
    const ResNetParams b = backward(p, at(x), up);
    ResNetParams diff = a;
    axpy(-1.0, b, diff);
    CHECK(std::sqrt(dot(diff, diff)) <= 1e-12 * std::sqrt(dot(b, b)));
  }
  SUBCASE("jet loss gradient") {
    Rng rng = test::seeded(30);
    const ResNetParams p = init_params(test::tiny_plan(2, 8, 10.0, 16, 2), rng);
    const std::vector<Vec2> pts{test::random_point(rng), test::random_point(rng),
                                test::random_point(rng)};
    const ResNetParams g = laplacian_loss_grad(p, pts);
    for (int t = 0; t < 10; ++t) {
      const ResNetParams d = test::random_direction(p.plan, rng);
      const double h = 1e-6;
      const double fd = (laplacian_loss(test::shifted(p, h, d), pts) -
                         laplacian_loss(test::shifted(p, -h, d), pts)) / (2 * h);
      CHECK(rel_err(dot(g, d), fd) <= 1e-4);
    }

    // Along a direction orthogonal to the gradient the loss changes only
    // at second order.
    ResNetParams d = test::random_direction(p.plan, rng);
    axpy(-dot(d, g) / dot(g, g), g, d);
    const double f0 = laplacian_loss(p, pts);
    const double c1 = std::abs(laplacian_loss(test::shifted(p, 1e-3, d), pts) - f0) / 1e-6;
    const double c2 = std::abs(laplacian_loss(test::shifted(p, 5e-4, d), pts) - f0) / 2.5e-7;
    CHECK(c2 <= 1.5 * c1 + 1e-9);
    CHECK(c1 <= 1.5 * c2 + 1e-9);
  }
}

TEST_CASE("parameter arithmetic") {
  Rng rng = test::seeded(31);
  const ResNetPlan plan = test::tiny_plan(2, 4);
  const ResNetParams a = test::random_direction(plan, rng);
  ResNetParams b = a;
  axpy(2.0, a, b);
  CHECK(dot(b, a) == doctest::Approx(3.0 * dot(a, a)).epsilon(1e-14));
  std::vector<std::string> names;
  a.for_each_array([&](const std::string &name, auto) { names.push_back(name); });
  CHECK(names.front() == "input.weight");
  CHECK(names[2] == "block0.layer0.weight");
  CHECK(names.back() == "output.bias");
}
