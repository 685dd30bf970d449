#include "scatter/fdfd.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "scatter/error.hpp"
#include "scatter/parallel.hpp"

namespace scatter {

namespace {

using SparseMatrix = Eigen::SparseMatrix<Complex>;
using ComplexVector = Eigen::VectorXcd;

constexpr std::int64_t kNotFluid = -1;
// Interpolation coordinates this close to a node snap onto it.
constexpr double kSnap = 1e-9;

Complex nan_complex() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {nan, nan};
}

struct Side {
  Vec2 normal;
  int di, dj; // step toward the interior
};

} // namespace

Vec2 FdfdSolution::node(std::size_t i, std::size_t j) const {
  return {static_cast<double>(i) * h, static_cast<double>(j) * h};
}

Complex FdfdSolution::sample(Vec2 x) const {
  if (!(x.x >= 0.0 && x.x <= 1.0 && x.y >= 0.0 && x.y <= 1.0))
    throw InputDomainError("sample point outside the unit square");
  auto locate = [this](double c, std::size_t &i0, double &t) {
    double f = c / h;
    if (std::abs(f - std::round(f)) < kSnap)
      f = std::round(f);
    i0 = std::min(static_cast<std::size_t>(std::floor(f)), n - 2);
    t = f - static_cast<double>(i0);
  };
  std::size_t i0, j0;
  double tx, ty;
  locate(x.x, i0, tx);
  locate(x.y, j0, ty);
  const double w[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
  const std::size_t idx[4] = {j0 * n + i0, j0 * n + i0 + 1, (j0 + 1) * n + i0,
                              (j0 + 1) * n + i0 + 1};
  Complex acc(0.0);
  for (int c = 0; c < 4; ++c) {
    if (w[c] == 0.0)
      continue;
    if (solid[idx[c]])
      return nan_complex();
    acc += w[c] * values[idx[c]];
  }
  return acc;
}

ComplexField FdfdSolution::field() const {
  ComplexField f;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (solid[j * n + i])
        continue;
      f.points.push_back(node(i, j));
      f.values.push_back(values[j * n + i]);
    }
  }
  return f;
}

ComplexField FdfdSolution::sample_field(std::span<const Vec2> points) const {
  ComplexField f;
  f.points.assign(points.begin(), points.end());
  f.values.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    f.values[i] = sample(points[i]);
  return f;
}

std::size_t fdfd_resolution_floor(const PhysicsConfig &physics, double h_target) {
  return static_cast<std::size_t>(std::ceil(2.0 / (physics.wavenumber() * h_target)));
}

std::vector<std::uint8_t> solid_mask(const ShapeVector &v, std::size_t n) {
  if (n < 3)
    throw InputDomainError("FDFD grid needs at least 3 nodes per side");
  const ShapeRegion region(shape_from_vector(v));
  const double h = 1.0 / static_cast<double>(n - 1);
  std::vector<std::uint8_t> solid(n * n, 0);
  parallel_for(n, [&](std::size_t j) {
    for (std::size_t i = 0; i < n; ++i)
      solid[j * n + i] = region.contains({i * h, j * h}) ? 1 : 0;
  });
  return solid;
}

FdfdSolution fdfd_solve_mask(std::size_t n, std::vector<std::uint8_t> solid,
                             const PhysicsConfig &physics,
                             const FdfdOptions &options) {
  physics.validate();
  if (n < 3)
    throw InputDomainError("FDFD grid needs at least 3 nodes per side");
  if (solid.size() != n * n)
    throw InputDomainError("solid mask size does not match the grid");

  FdfdSolution sol;
  sol.n = n;
  sol.h = 1.0 / static_cast<double>(n - 1);
  sol.solid = std::move(solid);
  const double h = sol.h;
  const double k = physics.wavenumber();
  const Complex I = options.conjugate ? Complex(0.0, -1.0) : Complex(0.0, 1.0);

  std::vector<std::int64_t> unknown(n * n, kNotFluid);
  std::int64_t count = 0;
  for (std::size_t p = 0; p < n * n; ++p) {
    if (!sol.solid[p])
      unknown[p] = count++;
  }
  if (count == 0)
    throw SolverError("grid has no fluid nodes");

  auto incident = [&](Vec2 x) {
    return physics.amplitude * std::exp(-I * k * dot(physics.direction, x));
  };

  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(count) * 5);
  ComplexVector b = ComplexVector::Zero(count);

  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t p = j * n + i;
      const std::int64_t row = unknown[p];
      if (row == kNotFluid)
        continue;
      const Vec2 x = sol.node(i, j);

      std::vector<Side> sides;
      if (i == 0)
        sides.push_back({{-1, 0}, 1, 0});
      if (i == n - 1)
        sides.push_back({{1, 0}, -1, 0});
      if (j == 0)
        sides.push_back({{0, -1}, 0, 1});
      if (j == n - 1)
        sides.push_back({{0, 1}, 0, -1});

      if (!sides.empty()) {
        // Scaled by h: (3 u0 - 4 u1 + u2) / 2 + i k h u0 = h g, averaged
        // over the sides meeting at a corner.
        const double w = 1.0 / static_cast<double>(sides.size());
        triplets.emplace_back(row, row, I * k * h);
        for (const Side &s : sides) {
          const std::size_t p1 = (j + s.dj) * n + (i + s.di);
          const std::size_t p2 = (j + 2 * s.dj) * n + (i + 2 * s.di);
          if (unknown[p1] == kNotFluid || unknown[p2] == kNotFluid)
            throw SolverError("scatterer touches the outer boundary stencil");
          triplets.emplace_back(row, row, Complex(1.5 * w));
          triplets.emplace_back(row, unknown[p1], Complex(-2.0 * w));
          triplets.emplace_back(row, unknown[p2], Complex(0.5 * w));
          if (options.outer_data)
            b[row] += w * h * options.outer_data(x, s.normal);
        }
        continue;
      }

      // Scaled by h^2: sum of neighbours - 4 u + (k h)^2 u = 0, with solid
      // neighbours replaced by the mirrored ghost u_P - h g.
      Complex diag(-4.0 + k * k * h * h);
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      for (int q = 0; q < 4; ++q) {
        const std::size_t pn = (j + dj[q]) * n + (i + di[q]);
        if (unknown[pn] != kNotFluid) {
          triplets.emplace_back(row, unknown[pn], Complex(1.0));
          continue;
        }
        diag += 1.0;
        if (!options.rigid_forcing)
          continue;
        const Vec2 normal{-static_cast<double>(di[q]), -static_cast<double>(dj[q])};
        const Vec2 face{x.x + 0.5 * h * di[q], x.y + 0.5 * h * dj[q]};
        const double proj = physics.rigid_bc == RigidBcMode::Projected
                                ? dot(physics.direction, normal)
                                : 1.0;
        const Complex g = I * k * proj * incident(face);
        b[row] += h * g;
      }
      triplets.emplace_back(row, row, diag);
    }
  }

  SparseMatrix a(count, count);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success)
    throw SolverError("singular FDFD system: " + lu.lastErrorMessage());

  const double b_norm = b.norm();
  ComplexVector u = ComplexVector::Zero(count);
  if (b_norm > 0.0) {
    u = lu.solve(b);
    double res = (b - a * u).norm() / b_norm;
    for (int it = 0; it < options.max_refinements && res > options.tolerance; ++it) {
      const ComplexVector r = b - a * u;
      u += lu.solve(r);
      res = (b - a * u).norm() / b_norm;
    }
    if (!(res <= options.tolerance))
      throw SolverError("FDFD solve did not converge: relative residual " +
                        std::to_string(res));
    sol.residual = res;
  }

  sol.values.assign(n * n, nan_complex());
  for (std::size_t p = 0; p < n * n; ++p) {
    if (unknown[p] != kNotFluid)
      sol.values[p] = u[unknown[p]];
  }
  return sol;
}

FdfdSolution fdfd_solve(const ShapeVector &v, const PhysicsConfig &physics,
                        std::size_t n, const FdfdOptions &options) {
  return fdfd_solve_mask(n, solid_mask(v, n), physics, options);
}

} // namespace scatter
