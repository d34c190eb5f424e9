#include "extlen/density.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

namespace extlen {
namespace {

// 4-point Gauss-Legendre on [0, 1].
constexpr double kGx[4] = {0.06943184420297371, 0.33000947820757187,
                           0.66999052179242813, 0.93056815579702629};
constexpr double kGw[4] = {0.17392742256872693, 0.32607257743127307,
                           0.32607257743127307, 0.17392742256872693};

// Arc parameterization of polygon side i and its derivative.
struct SideArc {
  Cx center;
  double radius, th0, dth;

  SideArc(const SurfacePresentation& s, int i) {
    const Geodesic& g = s.sides[i];
    center = g.center;
    radius = g.radius;
    int n = static_cast<int>(s.polygon.size());
    th0 = std::arg(s.polygon[i] - center);
    double th1 = std::arg(s.polygon[(i + 1) % n] - center);
    dth = std::remainder(th1 - th0, 2.0 * kPi);
  }
  Cx at(double u) const { return center + std::polar(radius, th0 + u * dth); }
  Cx deriv(double u) const {
    return Cx(0.0, dth) * std::polar(radius, th0 + u * dth);
  }
};

double fan_integral(const SurfacePresentation& s,
                    const std::function<double(const DiskPoint&)>& f, int m) {
  double total = 0.0;
  int n = static_cast<int>(s.polygon.size());
  for (int i = 0; i < n; ++i) {
    SideArc arc(s, i);
    for (int cu = 0; cu < m; ++cu)
      for (int cs = 0; cs < m; ++cs)
        for (int ju = 0; ju < 4; ++ju) {
          double u = (cu + kGx[ju]) / m;
          Cx gamma = arc.at(u), dgamma = arc.deriv(u);
          double cross = std::abs(gamma.real() * dgamma.imag() -
                                  gamma.imag() * dgamma.real());
          for (int js = 0; js < 4; ++js) {
            double sv = (cs + kGx[js]) / m;
            total += kGw[ju] * kGw[js] / (m * m) * sv * cross * f(sv * gamma);
          }
        }
  }
  return total;
}

QuadResult guarded(double coarse, double fine, const char* what) {
  QuadResult r{fine, std::abs(fine - coarse)};
  if (r.error > 0.01 * std::max(std::abs(fine), 1e-12))
    throw DensityError(std::string(what) + ": quadrature did not converge");
  return r;
}

double segment_integral(const ConformalDensity& rho, const FlowSegment& seg,
                        int panels) {
  double total = 0.0;
  for (int c = 0; c < panels; ++c)
    for (int j = 0; j < 4; ++j) {
      double t = seg.length * (c + kGx[j]) / panels;
      total += kGw[j] * seg.length / panels *
               rho.factor(segment_point(seg, t).base);
    }
  return total;
}

QuadResult chain_integral(const ConformalDensity& rho,
                          const std::vector<FlowSegment>& segs) {
  double coarse = 0.0, fine = 0.0;
  for (const auto& seg : segs) {
    if (seg.length <= 0.0) continue;
    int p = std::max(2, static_cast<int>(std::ceil(seg.length * 4.0)));
    coarse += segment_integral(rho, seg, p);
    fine += segment_integral(rho, seg, 2 * p);
  }
  return guarded(coarse, fine, "length_along");
}

}  // namespace

ConformalDensity ConformalDensity::hyperbolic(const SurfacePresentation& s,
                                              double scale) {
  ConformalDensity d(s);
  if (scale <= 0.0) throw DensityError("density scale must be positive");
  d.scale_ = scale;
  return d;
}

ConformalDensity ConformalDensity::with_bumps(const SurfacePresentation& s,
                                              std::vector<BumpSpec> specs,
                                              int orbit_length) {
  ConformalDensity d(s);
  d.specs_ = specs;
  d.orbit_length_ = orbit_length;

  // Deck elements up to the given word length, as reduced words (distinct
  // short words are distinct elements: the relator has length 4g).
  std::vector<MobiusMap> orbit{MobiusMap::identity()};
  std::vector<std::pair<MobiusMap, int>> frontier{{MobiusMap::identity(), 0}};
  for (int len = 1; len <= orbit_length; ++len) {
    std::vector<std::pair<MobiusMap, int>> next;
    for (const auto& [g, last] : frontier)
      for (int l = -2 * s.genus; l <= 2 * s.genus; ++l) {
        if (l == 0 || l == -last) continue;
        MobiusMap h = g * s.generator_map(l);
        orbit.push_back(h);
        next.push_back({h, l});
      }
    frontier = std::move(next);
  }

  for (const BumpSpec& spec : specs) {
    if (spec.sigma <= 0.0) throw DensityError("bump sigma must be positive");
    Bump b;
    b.sigma = spec.sigma;
    b.alpha = spec.alpha;
    double cutoff = s.vertex_radius + 8.0 * spec.sigma + 1.0;
    for (const MobiusMap& g : orbit) {
      DiskPoint c = g.apply(spec.center);
      if (hyp_distance(Cx(0, 0), c) <= cutoff) b.centers.push_back(c);
    }
    // From word length 4 on, distinct words can repeat an element (half
    // relators); drop duplicate translates.
    std::sort(b.centers.begin(), b.centers.end(), [](const Cx& u, const Cx& v) {
      return u.real() != v.real() ? u.real() < v.real() : u.imag() < v.imag();
    });
    b.centers.erase(std::unique(b.centers.begin(), b.centers.end(),
                                [](const Cx& u, const Cx& v) {
                                  return std::abs(u - v) < 1e-9;
                                }),
                    b.centers.end());
    d.bumps_.push_back(std::move(b));
  }
  return d;
}

double ConformalDensity::factor(const DiskPoint& z) const {
  double mod = 1.0;
  for (const Bump& b : bumps_) {
    double sum = 0.0;
    for (const DiskPoint& c : b.centers) {
      double dd = hyp_distance(z, c);
      sum += std::exp(-dd * dd / (2.0 * b.sigma * b.sigma));
    }
    mod += b.alpha * sum;
  }
  return scale_ * std::max(0.0, mod);
}

double ConformalDensity::operator()(const DiskPoint& z) const {
  return hyperbolic_density(z) * factor(z);
}

ConformalDensity ConformalDensity::rescaled(double c) const {
  if (c <= 0.0) throw DensityError("density scale must be positive");
  ConformalDensity d = *this;
  d.scale_ *= c;
  return d;
}

void ConformalDensity::save(std::ostream& os) const {
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return std::string(buf);
  };
  os << "extlen-density 1\n";
  os << "scale " << num(scale_) << "\n";
  os << "orbit " << orbit_length_ << "\n";
  os << "bumps " << specs_.size() << "\n";
  for (const BumpSpec& b : specs_)
    os << num(b.center.real()) << " " << num(b.center.imag()) << " "
       << num(b.sigma) << " " << num(b.alpha) << "\n";
}

ConformalDensity ConformalDensity::load(std::istream& is,
                                        const SurfacePresentation& s) {
  std::string magic, key;
  int version = 0;
  is >> magic >> version;
  if (magic != "extlen-density" || version != 1)
    throw DensityError("load density: bad header");
  double scale = 1.0;
  int orbit = 0;
  size_t nbumps = 0;
  is >> key >> scale;
  if (key != "scale") throw DensityError("load density: expected scale");
  is >> key >> orbit;
  if (key != "orbit") throw DensityError("load density: expected orbit");
  is >> key >> nbumps;
  if (key != "bumps") throw DensityError("load density: expected bumps");
  std::vector<BumpSpec> specs(nbumps);
  for (BumpSpec& b : specs) {
    double x, y;
    is >> x >> y >> b.sigma >> b.alpha;
    b.center = Cx(x, y);
  }
  if (!is) throw DensityError("load density: truncated");
  ConformalDensity d = nbumps ? with_bumps(s, std::move(specs), orbit)
                              : hyperbolic(s, 1.0);
  d.scale_ = scale;
  return d;
}

QuadResult polygon_integral(const SurfacePresentation& s,
                            const std::function<double(const DiskPoint&)>& f) {
  double coarse = fan_integral(s, f, 8);
  double fine = fan_integral(s, f, 16);
  return guarded(coarse, fine, "polygon_integral");
}

QuadResult area(const ConformalDensity& rho) {
  return polygon_integral(rho.surface(), [&](const DiskPoint& z) {
    double v = rho(z);
    return v * v;
  });
}

QuadResult length_along(const ConformalDensity& rho,
                        const std::vector<FlowSegment>& segs) {
  return chain_integral(rho, segs);
}

QuadResult length_along(const ConformalDensity& rho, const DiskPoint& z,
                        const DiskPoint& w) {
  FlowSegment seg{z, geodesic_direction(z, w), hyp_distance(z, w), -1};
  return chain_integral(rho, {seg});
}

QuadResult curve_rho_length(const ConformalDensity& rho,
                            const WeightedMultiCurve& c) {
  const SurfacePresentation& s = rho.surface();
  QuadResult out;
  for (const auto& comp : c.components) {
    double len = s.geodesic_length(comp.word);
    // Trace the closed geodesic by flowing along the axis from a point
    // reduced into the polygon; all sample points stay in the polygon.
    auto [rep, att] = axis_endpoints(s.evaluate(comp.word));
    DiskPoint p0 = axis_to_diameter(rep, att).inverse().apply(Cx(0, 0));
    UnitTangent v0{p0, boundary_direction(p0, att)};
    auto [p, word] = s.normalize_point(p0);
    UnitTangent v = s.evaluate(word).inverse().apply(v0);
    FlowTrajectory traj = flow(s, v, len);
    QuadResult piece = chain_integral(rho, traj.segments);
    out.value += comp.weight * piece.value;
    out.error += comp.weight * piece.error;
  }
  return out;
}

double birkhoff_average(const ConformalDensity& rho, const UnitTangent& v,
                        double T) {
  if (T <= 0.0) throw DensityError("birkhoff_average: T must be positive");
  FlowTrajectory traj = flow(rho.surface(), v, T);
  return chain_integral(rho, traj.segments).value / T;
}

double hopf_ratio(const ConformalDensity& rho, const WeightedMultiCurve& G) {
  return curve_rho_length(rho, G).value / std::sqrt(area(rho).value);
}

double hopf_bound(const SurfacePresentation& s) {
  return kPi / 2.0 * std::sqrt(s.area());
}

std::pair<double, double> cauchy_schwarz_check(const ConformalDensity& rho) {
  const SurfacePresentation& s = rho.surface();
  double lhs = polygon_integral(s, [&](const DiskPoint& z) {
                 return rho(z) * hyperbolic_density(z);
               }).value;
  double rhs = std::sqrt(area(rho).value * s.area());
  return {lhs, rhs};
}

}  // namespace extlen
