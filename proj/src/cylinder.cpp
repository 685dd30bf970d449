#include "scatter/cylinder.hpp"

#include <cmath>
#include <limits>

#include "scatter/bessel.hpp"
#include "scatter/error.hpp"
#include "scatter/parallel.hpp"

namespace scatter {

namespace {

// (-i)^n
Complex minus_i_pow(int n) {
  switch (n % 4) {
  case 0:
    return {1.0, 0.0};
  case 1:
    return {0.0, -1.0};
  case 2:
    return {-1.0, 0.0};
  default:
    return {0.0, 1.0};
  }
}

} // namespace

int CylinderProblem::min_terms() const {
  return static_cast<int>(std::ceil(physics.wavenumber() * radius)) + 10;
}

void CylinderProblem::validate() const {
  physics.validate();
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw InputDomainError("cylinder radius must be positive");
  if (n_terms < min_terms())
    throw InputDomainError("series truncation needs at least " +
                           std::to_string(min_terms()) + " terms");
  if (n_terms > kMaxBesselOrder)
    throw InputDomainError("series truncation is limited to " +
                           std::to_string(kMaxBesselOrder) + " terms");
}

FieldJet cylinder_scatter(const CylinderProblem &prob, Vec2 x) {
  prob.validate();
  const Vec2 d = x - prob.center;
  const double r = norm(d);
  if (r < prob.radius * (1.0 - 1e-12))
    throw InputDomainError("point lies inside the cylinder");

  const double k = prob.physics.wavenumber();
  const Vec2 e = prob.physics.direction;
  const int nt = prob.n_terms;
  // Two guard orders for H''_n = (H_{n-2} - 2 H_n + H_{n+2}) / 4.
  const auto at_a = bessel_jy_all(nt, k * prob.radius);
  const auto at_r = bessel_jy_all(nt + 2, k * r);

  const double theta = std::atan2(d.y, d.x);
  const double psi = theta - std::atan2(e.y, e.x);
  const double phase = -k * dot(e, prob.center);
  const Complex p0 = prob.physics.amplitude * Complex(std::cos(phase), std::sin(phase));

  auto hankel = [&](int n) {
    const auto &b = at_r[std::abs(n)];
    const Complex h(b.j, -b.y);
    return (n < 0 && (n % 2 != 0)) ? -h : h;
  };

  Complex f(0.0), f_r(0.0), f_rr(0.0), f_t(0.0), f_tt(0.0);
  for (int n = 0; n <= nt; ++n) {
    const Complex dh_a(at_a[n].dj, -at_a[n].dy);
    const Complex a_n = -at_a[n].dj / dh_a;
    const Complex c = (n == 0 ? 1.0 : 2.0) * minus_i_pow(n) * a_n * p0;
    const Complex h = hankel(n);
    const Complex dh(at_r[n].dj, -at_r[n].dy);
    const Complex d2h = 0.25 * (hankel(n - 2) - 2.0 * h + hankel(n + 2));
    const double cs = std::cos(n * psi);
    const double sn = std::sin(n * psi);
    f += c * h * cs;
    f_r += c * k * dh * cs;
    f_rr += c * k * k * d2h * cs;
    f_t -= c * static_cast<double>(n) * h * sn;
    f_tt -= c * static_cast<double>(n * n) * h * cs;
  }

  const double ct = d.x / r;
  const double st = d.y / r;
  FieldJet jet;
  jet.value = f;
  jet.dx = ct * f_r - st / r * f_t;
  jet.dy = st * f_r + ct / r * f_t;
  jet.laplacian = f_rr + f_r / r + f_tt / (r * r);
  return jet;
}

ComplexField cylinder_field(const CylinderProblem &prob,
                            std::span<const Vec2> points) {
  prob.validate();
  ComplexField field;
  field.points.assign(points.begin(), points.end());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  field.values.assign(points.size(), Complex(nan, nan));
  parallel_for(points.size(), [&](std::size_t i) {
    if (norm(points[i] - prob.center) >= prob.radius)
      field.values[i] = cylinder_scatter(prob, points[i]).value;
  });
  return field;
}

} // namespace scatter
