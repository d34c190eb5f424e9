#include "extlen/hyp.hpp"

#include <algorithm>

namespace extlen {

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

bool in_open_disk(const DiskPoint& z, double margin) {
  return std::norm(z) < (1.0 - margin) * (1.0 - margin);
}

MobiusMap MobiusMap::disk_translation(const DiskPoint& w) {
  double s = 1.0 - std::norm(w);
  if (s <= 0.0) throw HypError("disk_translation: point not in open disk");
  double inv = 1.0 / std::sqrt(s);
  return {Cx(inv, 0.0), w * inv, 0.0};
}

MobiusMap MobiusMap::rotation(double theta) {
  return {std::polar(1.0, theta / 2.0), Cx(0.0, 0.0), 0.0};
}

MobiusMap MobiusMap::two_point_map(const DiskPoint& z1, const DiskPoint& z2,
                                   const DiskPoint& w1, const DiskPoint& w2,
                                   double tol) {
  if (std::abs(hyp_distance(z1, z2) - hyp_distance(w1, w2)) > tol)
    throw HypError("two_point_map: point pairs are not isometric");
  MobiusMap to_z1 = disk_translation(z1);
  MobiusMap to_w1 = disk_translation(w1);
  Cx p = to_z1.inverse().apply(z2);
  Cx q = to_w1.inverse().apply(w2);
  double phi = std::arg(q) - std::arg(p);
  return to_w1 * rotation(phi) * to_z1.inverse();
}

MobiusMap MobiusMap::inverse() const {
  return {std::conj(a), -b, log_scale};
}

DiskPoint MobiusMap::apply(const DiskPoint& z) const {
  Cx den = std::conj(b) * z + std::conj(a);
  if (std::abs(den) < 1e-300) throw HypError("mobius apply: singular denominator");
  Cx w = (a * z + b) / den;
  if (std::norm(w) >= 1.0 - 1e-14)
    throw HypError("mobius apply: image numerically on or outside the unit circle");
  return w;
}

Cx MobiusMap::apply_boundary(const Cx& xi) const {
  Cx den = std::conj(b) * xi + std::conj(a);
  if (std::abs(den) < 1e-300) throw HypError("mobius apply_boundary: singular denominator");
  Cx w = (a * xi + b) / den;
  return w / std::abs(w);
}

Cx MobiusMap::direction_factor(const DiskPoint& z) const {
  Cx den = std::conj(b) * z + std::conj(a);
  Cx f = 1.0 / (den * den);
  return f / std::abs(f);
}

UnitTangent MobiusMap::apply(const UnitTangent& v) const {
  UnitTangent out;
  out.base = apply(v.base);
  out.angle = wrap_angle(v.angle + std::arg(direction_factor(v.base)));
  return out;
}

double MobiusMap::log_abs_trace() const {
  double t = 2.0 * std::abs(a.real());
  if (t == 0.0) return -std::numeric_limits<double>::infinity();
  return log_scale + std::log(t);
}

double MobiusMap::abs_trace() const { return std::exp(log_abs_trace()); }

bool MobiusMap::is_identity(double tol) const {
  // +-identity in SU(1,1) both act as the identity on the disk. Compare the
  // det-1 representative e^{log_scale} * M.
  double s = std::exp(log_scale);
  return std::abs(b) * s < tol &&
         (std::abs(a * s - Cx(1, 0)) < tol || std::abs(a * s + Cx(1, 0)) < tol);
}

void MobiusMap::renormalize() {
  // Magnitude-only rescale: det * e^{2 log_scale} == 1 is inherited from the
  // factors, and recomputing |a|^2 - |b|^2 at large magnitude would cancel
  // catastrophically.
  double mag = std::max(std::abs(a), std::abs(b));
  if (mag > 1e6 || log_scale != 0.0) {
    a /= mag;
    b /= mag;
    log_scale += std::log(mag);
  }
}

MobiusMap operator*(const MobiusMap& m1, const MobiusMap& m2) {
  MobiusMap out;
  out.a = m1.a * m2.a + m1.b * std::conj(m2.b);
  out.b = m1.a * m2.b + m1.b * std::conj(m2.a);
  out.log_scale = m1.log_scale + m2.log_scale;
  out.renormalize();
  return out;
}

double hyp_distance(const DiskPoint& z, const DiskPoint& w) {
  double num = std::abs(z - w);
  double den = std::abs(Cx(1.0, 0.0) - std::conj(z) * w);
  if (den <= 0.0) throw HypError("hyp_distance: points not in open disk");
  double r = num / den;
  if (r >= 1.0) throw HypError("hyp_distance: points not in open disk");
  return 2.0 * std::atanh(r);
}

double hyperbolic_density(const DiskPoint& z) {
  double s = 1.0 - std::norm(z);
  if (s <= 0.0) throw HypError("hyperbolic_density: point not in open disk");
  return 2.0 / s;
}

double translation_length(const MobiusMap& m) {
  double lt = m.log_abs_trace();
  if (lt < std::log(1e8)) {
    double t = std::exp(lt);
    if (t <= 2.0 + 1e-12)
      throw HypError("translation_length: element is not hyperbolic (|tr| <= 2)");
    return 2.0 * std::acosh(t / 2.0);
  }
  // |tr| huge: 2*(log|tr| + log(1/2 + sqrt(1/4 - tr^-2))), tr^-2 ~ 0.
  double inv2 = std::exp(-2.0 * lt);
  return 2.0 * (lt + std::log(0.5 + std::sqrt(std::max(0.0, 0.25 - inv2))));
}

DiskPoint geodesic_point(const DiskPoint& z, const DiskPoint& w, double t) {
  MobiusMap to_z = MobiusMap::disk_translation(z);
  Cx u = to_z.inverse().apply(w);
  double d = 2.0 * std::atanh(std::abs(u));
  if (d == 0.0) return z;
  Cx dir = u / std::abs(u);
  return to_z.apply(std::tanh(0.5 * t * d) * dir);
}

double geodesic_direction(const DiskPoint& z, const DiskPoint& w) {
  Cx u = MobiusMap::disk_translation(z).inverse().apply(w);
  if (std::abs(u) == 0.0) throw HypError("geodesic_direction: coincident points");
  return wrap_angle(std::arg(u));
}

double boundary_direction(const DiskPoint& z, const Cx& xi) {
  // Translate z to 0; the ray to the image of xi is straight.
  Cx u = (xi - z) / (1.0 - std::conj(z) * xi);
  return wrap_angle(std::arg(u));
}

double Geodesic::side(const Cx& z) const {
  if (is_line) return dir.real() * z.imag() - dir.imag() * z.real();
  return std::norm(z - center) - radius * radius;
}

Cx Geodesic::tangent(const Cx& z) const {
  if (is_line) return dir;
  Cx rad = z - center;
  return Cx(-rad.imag(), rad.real()) / std::abs(rad);
}

namespace {

// Orthogonal circle through two disk points: 2 Re(conj(c) v) = 1 + |v|^2.
std::optional<Geodesic> orthogonal_circle(const Cx& z, const Cx& w) {
  double a11 = 2.0 * z.real(), a12 = 2.0 * z.imag(), b1 = 1.0 + std::norm(z);
  double a21 = 2.0 * w.real(), a22 = 2.0 * w.imag(), b2 = 1.0 + std::norm(w);
  double det = a11 * a22 - a12 * a21;
  double scale = std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)});
  if (std::abs(det) < 1e-12 * scale * scale) return std::nullopt;  // through 0: a diameter
  Cx c{(b1 * a22 - b2 * a12) / det, (a11 * b2 - a21 * b1) / det};
  double r2 = std::norm(c) - 1.0;
  if (r2 <= 0.0) return std::nullopt;
  Geodesic g;
  g.is_line = false;
  g.center = c;
  g.radius = std::sqrt(r2);
  return g;
}

}  // namespace

Geodesic geodesic_through(const DiskPoint& z, const DiskPoint& w) {
  if (auto g = orthogonal_circle(z, w)) return *g;
  Geodesic g;
  g.is_line = true;
  Cx d = w - z;
  if (std::abs(d) == 0.0) throw HypError("geodesic_through: coincident points");
  g.dir = d / std::abs(d);
  return g;
}

Geodesic geodesic_from(const DiskPoint& z, double angle) {
  // Second point a short step along the geodesic.
  MobiusMap to_z = MobiusMap::disk_translation(z);
  Cx w = to_z.apply(0.25 * std::polar(1.0, angle));
  return geodesic_through(z, w);
}

std::pair<Cx, Cx> geodesic_endpoints(const DiskPoint& z, double angle) {
  MobiusMap to_z = MobiusMap::disk_translation(z);
  Cx fwd = to_z.apply_boundary(std::polar(1.0, angle));
  Cx bwd = to_z.apply_boundary(-std::polar(1.0, angle));
  return {bwd, fwd};
}

std::pair<Cx, Cx> axis_endpoints(const MobiusMap& m) {
  // Fixed points of z -> (a z + b)/(conj(b) z + conj(a)):
  // conj(b) z^2 + (conj(a) - a) z - b = 0.
  Cx A = std::conj(m.b);
  Cx B = std::conj(m.a) - m.a;
  Cx C = -m.b;
  if (std::abs(A) < 1e-300) {
    // Rotation-free diagonal element: axis through 0 along arg... a real.
    // Fixed points at +-1 direction of translation axis through origin.
    throw HypError("axis_endpoints: element has no off-diagonal part");
  }
  Cx disc = std::sqrt(B * B - 4.0 * A * C);
  Cx x1 = (-B + disc) / (2.0 * A);
  Cx x2 = (-B - disc) / (2.0 * A);
  x1 /= std::abs(x1);
  x2 /= std::abs(x2);
  // Attracting fixed point: |derivative| < 1.
  auto deriv_mag = [&m](const Cx& xi) {
    Cx den = std::conj(m.b) * xi + std::conj(m.a);
    return 1.0 / std::norm(den);  // relative magnitude is what matters
  };
  if (deriv_mag(x1) < deriv_mag(x2)) return {x2, x1};
  return {x1, x2};
}

MobiusMap axis_to_diameter(const Cx& xi_minus, const Cx& xi_plus) {
  // Rotate so the endpoints become conjugate pair e^{+-i psi}, translate the
  // nearest point of the axis to 0, rotate image endpoints onto -1, +1.
  double phi = 0.5 * (std::arg(xi_plus) + std::arg(xi_minus));
  MobiusMap rot = MobiusMap::rotation(-phi);
  Cx p = rot.apply_boundary(xi_plus);
  Cx q = rot.apply_boundary(xi_minus);
  // p = e^{i psi}, q = e^{-i psi} or with roles swapped/sign flipped.
  double psi = std::arg(p);
  MobiusMap m;
  double c = std::cos(psi);
  if (std::abs(c) < 1e-14) {
    m = rot;  // already a diameter through 0 (vertical); fall through to final rotation
  } else {
    double cc = 1.0 / c;
    double r = std::sqrt(std::max(0.0, cc * cc - 1.0));
    double x0 = (std::abs(cc - r) < 1.0) ? (cc - r) : (cc + r);
    m = MobiusMap::disk_translation(Cx(-x0, 0.0)) * rot;
  }
  Cx img = m.apply_boundary(xi_plus);
  MobiusMap out = MobiusMap::rotation(-std::arg(img)) * m;
  return out;
}

double axis_coordinate(const DiskPoint& z) {
  double n1 = std::norm(Cx(1.0, 0.0) + z);
  double n2 = std::norm(Cx(1.0, 0.0) - z);
  return 0.5 * std::log(n1 / n2);
}

double axis_offset(const DiskPoint& z) {
  double s = 1.0 - std::norm(z);
  return std::asinh(2.0 * std::abs(z.imag()) / s);
}

std::vector<Cx> geodesic_intersections(const Geodesic& g1, const Geodesic& g2) {
  std::vector<Cx> out;
  if (g1.is_line && g2.is_line) {
    // Both through 0: either identical or meet only at 0.
    out.push_back(Cx(0.0, 0.0));
    return out;
  }
  if (g1.is_line || g2.is_line) {
    const Geodesic& line = g1.is_line ? g1 : g2;
    const Geodesic& circ = g1.is_line ? g2 : g1;
    // z = t * dir; |t dir - c|^2 = r^2.
    double bq = -2.0 * (line.dir.real() * circ.center.real() +
                        line.dir.imag() * circ.center.imag());
    double cq = std::norm(circ.center) - circ.radius * circ.radius;
    double disc = bq * bq - 4.0 * cq;
    if (disc < 0.0) return out;
    double s = std::sqrt(disc);
    out.push_back(line.dir * ((-bq + s) / 2.0));
    out.push_back(line.dir * ((-bq - s) / 2.0));
    return out;
  }
  Cx d = g2.center - g1.center;
  double dist = std::abs(d);
  if (dist < 1e-14) return out;
  double r1 = g1.radius, r2 = g2.radius;
  double x = (dist * dist + r1 * r1 - r2 * r2) / (2.0 * dist);
  double y2 = r1 * r1 - x * x;
  if (y2 < 0.0) return out;
  double y = std::sqrt(y2);
  Cx u = d / dist;
  Cx base = g1.center + u * x;
  Cx perp = Cx(-u.imag(), u.real());
  out.push_back(base + perp * y);
  out.push_back(base - perp * y);
  return out;
}

}  // namespace extlen
