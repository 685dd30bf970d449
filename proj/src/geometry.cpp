#include "scatter/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "scatter/error.hpp"

namespace scatter {

namespace {

constexpr int kMaxDegree = 8;
constexpr double kKnotOffset = 1e-9;

// Octant directions of the template control points C_0..C_7.
constexpr std::array<double, 8> kSignX{1, 1, 0, -1, -1, -1, 0, 1};
constexpr std::array<double, 8> kSignY{0, 1, 1, 1, 0, -1, -1, -1};

void require_parameter(double u) {
  if (!(u >= 0.0 && u <= 1.0))
    throw InputDomainError("curve parameter " + std::to_string(u) +
                           " outside [0, 1]");
}

enum class Side { Above, Below };

// Knot span s in [p, n] containing u. Side::Below picks t_s < u <= t_{s+1}
// so derivatives at a knot are the limit from the left.
std::size_t find_span(const KnotVector &t, int p, std::size_t n, double u,
                      Side side) {
  const auto deg = static_cast<std::size_t>(p);
  if (side == Side::Above) {
    if (u >= t[n + 1])
      return n;
    std::size_t s = deg;
    while (s + 1 <= n && t[s + 1] <= u)
      ++s;
    return s;
  }
  if (u <= t[deg])
    return deg;
  std::size_t s = deg;
  while (s < n && u > t[s + 1])
    ++s;
  return s;
}

// Nonzero basis functions N_{s-p+r,p}(u), r = 0..p, and their derivatives.
void basis_in_span(const KnotVector &t, std::size_t s, int p, double u,
                   double *values, double *derivs) {
  std::array<double, kMaxDegree + 1> left{}, right{};
  std::array<double, kMaxDegree + 1> lower{};
  values[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    if (j == p)
      std::copy(values, values + p, lower.begin());
    left[j] = u - t[s + 1 - j];
    right[j] = t[s + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = values[r] / (right[r + 1] + left[j - r]);
      values[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    values[j] = saved;
  }
  if (derivs == nullptr)
    return;
  if (p == 0) {
    derivs[0] = 0.0;
    return;
  }
  // lower[q] = N_{s-p+1+q, p-1}, q = 0..p-1.
  for (int r = 0; r <= p; ++r) {
    const std::size_t i = s - p + r;
    double d = 0.0;
    if (r >= 1)
      d += lower[r - 1] / (t[i + p] - t[i]);
    if (r <= p - 1)
      d -= lower[r] / (t[i + p + 1] - t[i + 1]);
    derivs[r] = p * d;
  }
}

struct RationalJet {
  Vec2 point;
  Vec2 derivative;
};

RationalJet rational_jet(const NurbsCurve &curve, double u, Side side,
                         bool want_derivative) {
  const int p = curve.degree();
  const auto &pts = curve.control_points();
  const auto &w = curve.weights();
  const std::size_t n = pts.size() - 1;
  const std::size_t s = find_span(curve.knots(), p, n, u, side);

  std::array<double, kMaxDegree + 1> N{}, dN{};
  basis_in_span(curve.knots(), s, p, u, N.data(),
                want_derivative ? dN.data() : nullptr);

  double W = 0.0, dW = 0.0;
  Vec2 A, dA;
  for (int r = 0; r <= p; ++r) {
    const std::size_t i = s - p + r;
    W += w[i] * N[r];
    A = A + (w[i] * N[r]) * pts[i];
    if (want_derivative) {
      dW += w[i] * dN[r];
      dA = dA + (w[i] * dN[r]) * pts[i];
    }
  }
  if (!(W > 0.0))
    throw DegenerateGeometryError("rational denominator is not positive");
  RationalJet jet;
  jet.point = (1.0 / W) * A;
  if (want_derivative)
    jet.derivative = (1.0 / W) * (dA - dW * jet.point);
  return jet;
}

bool is_interior_knot(const KnotVector &t, double u) {
  if (u <= 0.0 || u >= 1.0)
    return false;
  return std::any_of(t.values().begin(), t.values().end(),
                     [u](double k) { return std::abs(k - u) <= 1e-15; });
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double s = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return norm(p - (a + s * ab));
}

} // namespace

// ---------------------------------------------------------------------------

KnotVector::KnotVector(std::vector<double> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2)
    throw InputDomainError("knot vector needs at least two entries");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!(knots_[i] >= 0.0 && knots_[i] <= 1.0))
      throw InputDomainError("knot " + std::to_string(i) + " outside [0, 1]");
    if (i > 0 && knots_[i] < knots_[i - 1])
      throw InputDomainError("knot vector is decreasing at entry " +
                             std::to_string(i));
  }
}

KnotVector KnotVector::quarter_template() {
  return KnotVector({0.0, 0.0, 0.0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75, 1.0, 1.0,
                     1.0});
}

bool KnotVector::clamped(int degree) const {
  const auto d = static_cast<std::size_t>(degree);
  if (knots_.size() < 2 * (d + 1))
    return false;
  for (std::size_t i = 1; i <= d; ++i) {
    if (knots_[i] != knots_[0] || knots_[size() - 1 - i] != knots_.back())
      return false;
  }
  return true;
}

NurbsCurve::NurbsCurve(int degree, std::vector<Vec2> control_points,
                       std::vector<double> weights, KnotVector knots)
    : degree_(degree), points_(std::move(control_points)),
      weights_(std::move(weights)), knots_(std::move(knots)) {
  if (degree_ < 0 || degree_ > kMaxDegree)
    throw InputDomainError("unsupported curve degree " +
                           std::to_string(degree_));
  if (points_.size() < static_cast<std::size_t>(degree_) + 1)
    throw InputDomainError("too few control points for the degree");
  if (weights_.size() != points_.size())
    throw InputDomainError("weight count differs from control point count");
  if (knots_.size() != points_.size() + degree_ + 1)
    throw InputDomainError("knot count must equal control points + degree + 1");
  if (!knots_.clamped(degree_))
    throw InputDomainError("knot vector is not clamped");
  if (!(points_.front() == points_.back()))
    throw InputDomainError("curve is not closed: first and last control "
                           "points differ");
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw InputDomainError("weights must be positive and finite");
  }
  for (const auto &p : points_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw InputDomainError("control points must be finite");
  }
}

std::array<double, 16> ShapeVector::flat() const {
  std::array<double, 16> out{};
  std::copy(cx.begin(), cx.end(), out.begin());
  std::copy(cy.begin(), cy.end(), out.begin() + 8);
  return out;
}

ShapeVector ShapeVector::from_flat(const std::array<double, 16> &values) {
  ShapeVector v;
  std::copy(values.begin(), values.begin() + 8, v.cx.begin());
  std::copy(values.begin() + 8, values.end(), v.cy.begin());
  return v;
}

// ---------------------------------------------------------------------------

double basis(std::size_t i, int degree, double u, const KnotVector &knots) {
  require_parameter(u);
  if (degree < 0)
    throw InputDomainError("negative basis degree");
  if (i + static_cast<std::size_t>(degree) + 1 >= knots.size())
    throw InputDomainError("basis index " + std::to_string(i) +
                           " out of range for degree " +
                           std::to_string(degree));
  const KnotVector &t = knots;
  if (degree == 0) {
    if (t[i] <= u && u < t[i + 1])
      return 1.0;
    if (u == t[t.size() - 1] && t[i] < t[i + 1]) {
      // u = last knot closes the last non-empty span.
      for (std::size_t j = i + 1; j + 1 < t.size(); ++j) {
        if (t[j] < t[j + 1])
          return 0.0;
      }
      return 1.0;
    }
    return 0.0;
  }
  double value = 0.0;
  const double d1 = t[i + degree] - t[i];
  if (d1 != 0.0)
    value += (u - t[i]) / d1 * basis(i, degree - 1, u, knots);
  const double d2 = t[i + degree + 1] - t[i + 1];
  if (d2 != 0.0)
    value += (t[i + degree + 1] - u) / d2 * basis(i + 1, degree - 1, u, knots);
  return value;
}

Vec2 evaluate(const NurbsCurve &curve, double u) {
  require_parameter(u);
  return rational_jet(curve, u, Side::Above, false).point;
}

Vec2 tangent(const NurbsCurve &curve, double u) {
  require_parameter(u);
  return rational_jet(curve, u, Side::Below, true).derivative;
}

Vec2 outward_normal(const NurbsCurve &curve, double u) {
  const Vec2 t = tangent(curve, u);
  const double len = norm(t);
  if (!(len > 1e-12))
    throw DegenerateGeometryError("zero tangent at u = " + std::to_string(u));
  return {t.y / len, -t.x / len};
}

std::vector<BoundarySample> sample_boundary(const NurbsCurve &curve,
                                            std::size_t n) {
  if (n < 3)
    throw InputDomainError("boundary sampling needs at least 3 points");
  std::vector<BoundarySample> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double u = static_cast<double>(j) / static_cast<double>(n);
    const double u_normal =
        is_interior_knot(curve.knots(), u) ? u + kKnotOffset : u;
    out.push_back({evaluate(curve, u), outward_normal(curve, u_normal), u});
  }
  return out;
}

ShapeRegion::ShapeRegion(const NurbsCurve &curve) {
  vertices_.reserve(kSegments);
  lo_ = {std::numeric_limits<double>::infinity(),
         std::numeric_limits<double>::infinity()};
  hi_ = {-lo_.x, -lo_.y};
  for (std::size_t j = 0; j < kSegments; ++j) {
    const Vec2 p = evaluate(curve, static_cast<double>(j) / kSegments);
    vertices_.push_back(p);
    lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y)};
    hi_ = {std::max(hi_.x, p.x), std::max(hi_.y, p.y)};
  }
}

bool ShapeRegion::contains(Vec2 p) const {
  constexpr double tol = 1e-9;
  if (p.x < lo_.x - tol || p.x > hi_.x + tol || p.y < lo_.y - tol ||
      p.y > hi_.y + tol)
    return false;
  bool inside = false;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = vertices_[j];
    const Vec2 b = vertices_[i];
    if (segment_distance(p, a, b) <= tol)
      return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross)
        inside = !inside;
    }
  }
  return inside;
}

bool point_in_shape(const NurbsCurve &curve, Vec2 p) {
  return ShapeRegion(curve).contains(p);
}

NurbsCurve shape_from_vector(const ShapeVector &v) {
  for (std::size_t i = 0; i < 8; ++i) {
    if (!std::isfinite(v.cx[i]) || !std::isfinite(v.cy[i]))
      throw InputDomainError("shape vector entry " + std::to_string(i) +
                             " is not finite");
  }
  std::vector<Vec2> points(9);
  for (std::size_t i = 0; i < 8; ++i) {
    points[i] = {kShapeCenter.x + kSignX[i] * std::abs(v.cx[i]),
                 kShapeCenter.y + kSignY[i] * std::abs(v.cy[i])};
  }
  points[8] = points[0];
  return NurbsCurve(2, std::move(points), std::vector<double>(9, 1.0),
                    KnotVector::quarter_template());
}

ShapeVector vector_from_shape(const NurbsCurve &curve) {
  const auto &pts = curve.control_points();
  if (pts.size() != 9)
    throw InputDomainError("template curves have 9 control points");
  ShapeVector v;
  for (std::size_t i = 0; i < 8; ++i) {
    const Vec2 d = pts[i] - kShapeCenter;
    v.cx[i] = std::abs(d.x);
    v.cy[i] = std::abs(d.y);
  }
  // On-axis points: copy the used magnitude into the ignored slot.
  v.cy[0] = v.cx[0];
  v.cx[2] = v.cy[2];
  v.cy[4] = v.cx[4];
  v.cx[6] = v.cy[6];
  return v;
}

ShapeVector random_shape(Rng &rng) {
  ShapeVector v;
  for (auto &c : v.cx)
    c = uniform(rng, kMagnitudeMin, kMagnitudeMax);
  for (auto &c : v.cy)
    c = uniform(rng, kMagnitudeMin, kMagnitudeMax);
  return v;
}

CircleFit circle_shape(double radius) {
  if (!(radius > 0.0 && radius <= 0.2))
    throw InputDomainError("circle radius must lie in (0, 0.2]");

  // Geometric slots: (control point, axis) with axis 0 = x, 1 = y.
  struct Slot {
    std::size_t point;
    int axis;
  };
  std::vector<Slot> slots;
  for (std::size_t i = 0; i < 8; ++i) {
    if (kSignX[i] != 0)
      slots.push_back({i, 0});
    if (kSignY[i] != 0)
      slots.push_back({i, 1});
  }
  const auto n_params = static_cast<Eigen::Index>(slots.size());

  constexpr std::size_t kFitSamples = 360;
  const KnotVector knots = KnotVector::quarter_template();
  // Basis rows for the fixed sample parameters; control point 8 aliases 0.
  Eigen::MatrixXd B(kFitSamples, 8);
  B.setZero();
  for (std::size_t j = 0; j < kFitSamples; ++j) {
    const double u = static_cast<double>(j) / kFitSamples;
    const std::size_t s = find_span(knots, 2, 8, u, Side::Above);
    std::array<double, 3> N{};
    basis_in_span(knots, s, 2, u, N.data(), nullptr);
    for (int r = 0; r <= 2; ++r)
      B(j, (s - 2 + r) % 8) += N[r];
  }

  Eigen::VectorXd params = Eigen::VectorXd::Constant(n_params, radius);
  Eigen::VectorXd residual(kFitSamples);
  Eigen::MatrixXd J(kFitSamples, n_params);
  for (int iter = 0; iter < 100; ++iter) {
    Eigen::VectorXd ox = Eigen::VectorXd::Zero(8), oy = Eigen::VectorXd::Zero(8);
    for (Eigen::Index q = 0; q < n_params; ++q) {
      const auto &sl = slots[q];
      if (sl.axis == 0)
        ox[sl.point] = kSignX[sl.point] * params[q];
      else
        oy[sl.point] = kSignY[sl.point] * params[q];
    }
    const Eigen::VectorXd px = B * ox, py = B * oy;
    for (std::size_t j = 0; j < kFitSamples; ++j) {
      const double rad = std::hypot(px[j], py[j]);
      residual[j] = rad - radius;
      for (Eigen::Index q = 0; q < n_params; ++q) {
        const auto &sl = slots[q];
        const double dir = sl.axis == 0 ? px[j] / rad * kSignX[sl.point]
                                        : py[j] / rad * kSignY[sl.point];
        J(j, q) = dir * B(j, sl.point);
      }
    }
    const Eigen::VectorXd step = J.colPivHouseholderQr().solve(-residual);
    params += step;
    if (step.lpNorm<Eigen::Infinity>() < 1e-15 * radius)
      break;
  }

  CircleFit fit;
  for (Eigen::Index q = 0; q < n_params; ++q) {
    const auto &sl = slots[q];
    (sl.axis == 0 ? fit.shape.cx : fit.shape.cy)[sl.point] = params[q];
  }
  fit.shape.cy[0] = fit.shape.cx[0];
  fit.shape.cx[2] = fit.shape.cy[2];
  fit.shape.cy[4] = fit.shape.cx[4];
  fit.shape.cx[6] = fit.shape.cy[6];

  const NurbsCurve curve = shape_from_vector(fit.shape);
  for (std::size_t j = 0; j < 1000; ++j) {
    const Vec2 p = evaluate(curve, static_cast<double>(j) / 1000.0);
    fit.max_radial_deviation = std::max(
        fit.max_radial_deviation, std::abs(norm(p - kShapeCenter) - radius));
  }
  if (!(fit.max_radial_deviation <= 0.05 * radius))
    throw FitError("circle fit residual " +
                   std::to_string(fit.max_radial_deviation) +
                   " exceeds 5% of radius " + std::to_string(radius));
  return fit;
}

} // namespace scatter
