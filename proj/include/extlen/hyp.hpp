#pragma once

// Poincare disk model primitives: Mobius isometries in SU(1,1) form,
// hyperbolic distance, the hyperbolic area density, geodesics as circular
// arcs orthogonal to the unit circle.

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace extlen {

using Cx = std::complex<double>;
using DiskPoint = Cx;

inline constexpr double kPi = 3.14159265358979323846;

struct HypError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double wrap_angle(double a);  // reduce into [0, 2*pi)

bool in_open_disk(const DiskPoint& z, double margin = 0.0);

struct UnitTangent {
  DiskPoint base{0.0, 0.0};
  double angle = 0.0;  // radians, wrapped mod 2*pi
};

// Orientation-preserving isometry of the disk, stored as the SU(1,1) matrix
// [[a, b], [conj(b), conj(a)]] acting by z -> (a z + b) / (conj(b) z + conj(a)).
//
// The determinant-1 representative of the group element is e^{log_scale} * M
// where M is the stored matrix. In the normal regime log_scale == 0 and
// |a|^2 - |b|^2 == 1; for very long words (entries beyond 1e6) the matrix is
// rescaled to unit magnitude and the scale is carried in log_scale so that
// traces of words with translation length in the thousands stay computable.
struct MobiusMap {
  Cx a{1.0, 0.0};
  Cx b{0.0, 0.0};
  double log_scale = 0.0;

  static MobiusMap identity() { return {}; }
  static MobiusMap disk_translation(const DiskPoint& w);  // 0 -> w
  static MobiusMap rotation(double theta);                // about 0
  // Unique orientation-preserving isometry with z1 -> w1, z2 -> w2.
  // Requires d(z1,z2) == d(w1,w2) within tol.
  static MobiusMap two_point_map(const DiskPoint& z1, const DiskPoint& z2,
                                 const DiskPoint& w1, const DiskPoint& w2,
                                 double tol = 1e-9);

  MobiusMap inverse() const;
  DiskPoint apply(const DiskPoint& z) const;
  // Action on unit-circle (ideal) points; no interior check.
  Cx apply_boundary(const Cx& xi) const;
  // Unit complex factor rotating tangent directions at z.
  Cx direction_factor(const DiskPoint& z) const;
  UnitTangent apply(const UnitTangent& v) const;

  // |trace| of the det-1 representative, in log form: returns log(|tr|).
  double log_abs_trace() const;
  double abs_trace() const;  // overflows to inf for deep log_scale; use log form

  bool is_identity(double tol = 1e-9) const;
  void renormalize();
};

MobiusMap operator*(const MobiusMap& m1, const MobiusMap& m2);

double hyp_distance(const DiskPoint& z, const DiskPoint& w);
double hyperbolic_density(const DiskPoint& z);  // 2 / (1 - |z|^2)

// Length of the closed geodesic of a hyperbolic element, 2*arccosh(|tr|/2).
// Switches to the log-space form for |tr| > 1e8. Throws HypError for
// |tr| <= 2 (elliptic or parabolic).
double translation_length(const MobiusMap& m);

// Point at hyperbolic-arclength fraction t in [0,1] from z to w.
DiskPoint geodesic_point(const DiskPoint& z, const DiskPoint& w, double t);
// Initial direction (angle) of the geodesic from z towards w.
double geodesic_direction(const DiskPoint& z, const DiskPoint& w);
// Initial direction of the geodesic ray from z to the ideal point xi.
double boundary_direction(const DiskPoint& z, const Cx& xi);

// A complete geodesic of the disk: either a diameter (line through 0) or a
// circle orthogonal to the unit circle.
struct Geodesic {
  bool is_line = false;
  Cx dir{1.0, 0.0};    // line: unit direction
  Cx center{0.0, 0.0}; // circle: Euclidean center, |center| > 1
  double radius = 0.0;

  // Signed side value; zero on the geodesic. For circles |z-c|^2 - r^2,
  // for lines the cross product with dir. Positive on the side of 0 for
  // circles (0 is always outside an orthogonal circle).
  double side(const Cx& z) const;
  // Euclidean tangent of the circle/line at a point on it (sign arbitrary).
  Cx tangent(const Cx& z) const;
};

Geodesic geodesic_through(const DiskPoint& z, const DiskPoint& w);
Geodesic geodesic_from(const DiskPoint& z, double angle);

// Ideal endpoints of the geodesic from (z, angle): {backward, forward}.
std::pair<Cx, Cx> geodesic_endpoints(const DiskPoint& z, double angle);

// Fixed points on the unit circle of a hyperbolic element:
// {repelling, attracting}.
std::pair<Cx, Cx> axis_endpoints(const MobiusMap& m);

// Isometry taking the geodesic (xi_minus -> xi_plus) to the real diameter
// (-1 -> +1), with the point of the axis nearest the origin going to 0.
MobiusMap axis_to_diameter(const Cx& xi_minus, const Cx& xi_plus);

// Coordinates relative to the real diameter: signed arclength of the foot of
// the perpendicular, and unsigned distance from the axis.
double axis_coordinate(const DiskPoint& z);   // (1/2) log(|1+z|^2 / |1-z|^2)
double axis_offset(const DiskPoint& z);       // asinh(2 |Im z| / (1 - |z|^2))

// Intersections of two complete geodesics (0, 1, or 2 points; 2 only when
// numerically tangent).
std::vector<Cx> geodesic_intersections(const Geodesic& g1, const Geodesic& g2);

}  // namespace extlen
