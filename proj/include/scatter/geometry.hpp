#ifndef SCATTER_GEOMETRY_HPP
#define SCATTER_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "scatter/rng.hpp"

namespace scatter {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Center of every template scatterer inside the unit square.
inline constexpr Vec2 kShapeCenter{0.5, 0.5};

// Non-decreasing knot sequence in [0, 1].
class KnotVector {
public:
  explicit KnotVector(std::vector<double> knots);

  // [0,0,0,1/4,1/4,1/2,1/2,3/4,3/4,1,1,1]: clamped quadratic, double interior
  // knots at the quarter points.
  static KnotVector quarter_template();

  std::size_t size() const { return knots_.size(); }
  double operator[](std::size_t i) const { return knots_[i]; }
  const std::vector<double> &values() const { return knots_; }
  bool clamped(int degree) const;

private:
  std::vector<double> knots_;
};

// Closed planar NURBS curve: first and last control points coincide and
// knots.size() == control_points.size() + degree + 1.
class NurbsCurve {
public:
  NurbsCurve(int degree, std::vector<Vec2> control_points,
             std::vector<double> weights, KnotVector knots);

  int degree() const { return degree_; }
  const std::vector<Vec2> &control_points() const { return points_; }
  const std::vector<double> &weights() const { return weights_; }
  const KnotVector &knots() const { return knots_; }

private:
  int degree_;
  std::vector<Vec2> points_;
  std::vector<double> weights_;
  KnotVector knots_;
};

struct BoundarySample {
  Vec2 position;
  Vec2 outward_normal;
  double u = 0.0;
};

// 16 control-point offset magnitudes of a template scatterer (meters).
// Branch input order is cx[0..7] followed by cy[0..7].
struct ShapeVector {
  std::array<double, 8> cx{};
  std::array<double, 8> cy{};

  std::array<double, 16> flat() const;
  static ShapeVector from_flat(const std::array<double, 16> &values);
  friend bool operator==(const ShapeVector &, const ShapeVector &) = default;
};

inline constexpr double kMagnitudeMin = 0.05;
inline constexpr double kMagnitudeMax = 0.15;

// Cox-de Boor recursion for N_{i,k}(u). Spans are half-open [t_i, t_{i+1})
// except the last non-empty span, which is closed at u = 1; 0/0 terms are 0.
double basis(std::size_t i, int degree, double u, const KnotVector &knots);

Vec2 evaluate(const NurbsCurve &curve, double u);

// dC/du. At an interior knot the limit from below is returned (from above at
// u = 0).
Vec2 tangent(const NurbsCurve &curve, double u);

// Unit tangent rotated by -90 degrees; points away from the interior of a
// counter-clockwise curve.
Vec2 outward_normal(const NurbsCurve &curve, double u);

// n samples at u_j = j/n. Normals at interior knots are taken at u_j + 1e-9.
std::vector<BoundarySample> sample_boundary(const NurbsCurve &curve,
                                            std::size_t n);

// Polyline approximation used for membership queries. Building it costs 512
// curve evaluations, so reuse one region for many points.
class ShapeRegion {
public:
  static constexpr std::size_t kSegments = 512;

  explicit ShapeRegion(const NurbsCurve &curve);

  // Ray-crossing test; points within 1e-9 of the polyline count as inside.
  bool contains(Vec2 p) const;
  const std::vector<Vec2> &polyline() const { return vertices_; }

private:
  std::vector<Vec2> vertices_;
  Vec2 lo_, hi_;
};

bool point_in_shape(const NurbsCurve &curve, Vec2 p);

// Octagon template: control point i sits at the center offset along octant i
// (+x, +x+y, +y, -x+y, -x, -x-y, -y, +x-y). On-axis points use only cx (i=0,4)
// or cy (i=2,6); the other slot is carried but ignored geometrically.
NurbsCurve shape_from_vector(const ShapeVector &v);

// Inverse of shape_from_vector on the geometric slots; each unused on-axis
// slot receives the magnitude of its used partner.
ShapeVector vector_from_shape(const NurbsCurve &curve);

// All 16 magnitudes i.i.d. uniform in [kMagnitudeMin, kMagnitudeMax].
ShapeVector random_shape(Rng &rng);

struct CircleFit {
  ShapeVector shape;
  double max_radial_deviation = 0.0;
};

// Least-squares template fit to the circle of radius r about kShapeCenter.
CircleFit circle_shape(double radius);

} // namespace scatter

#endif // SCATTER_GEOMETRY_HPP
