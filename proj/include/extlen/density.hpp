#pragma once

// Allowable conformal metrics as densities rho relative to |dz| on the
// fundamental polygon, compatible with the side pairings. The realized family
// is rho_X * (deck-invariant factor): the hyperbolic density itself, scaled
// copies, and orbit-summed Gaussian bump modulations.

#include <functional>
#include <utility>

#include "extlen/flow.hpp"

namespace extlen {

struct DensityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Value plus the refinement-difference error estimate of the quadrature.
struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

struct BumpSpec {
  DiskPoint center{0.0, 0.0};  // inside the fundamental polygon
  double sigma = 0.5;          // hyperbolic-distance Gaussian width
  double alpha = 0.0;          // signed amplitude
};

class ConformalDensity {
 public:
  static ConformalDensity hyperbolic(const SurfacePresentation& s,
                                     double scale = 1.0);
  // rho = scale * rho_X * max(0, 1 + sum_i alpha_i * B_i) where B_i sums the
  // Gaussian bump over deck translates of its center up to the given word
  // length; the factor is deck-invariant, so pairing compatibility is
  // automatic up to orbit truncation.
  static ConformalDensity with_bumps(const SurfacePresentation& s,
                                     std::vector<BumpSpec> specs,
                                     int orbit_length = 5);

  // Density value at z, valid on and near the fundamental polygon.
  double operator()(const DiskPoint& z) const;
  // The deck-invariant quotient rho / rho_X at z.
  double factor(const DiskPoint& z) const;

  double scale() const { return scale_; }
  const SurfacePresentation& surface() const { return *surf_; }
  ConformalDensity rescaled(double c) const;

  void save(std::ostream& os) const;
  static ConformalDensity load(std::istream& is, const SurfacePresentation& s);

 private:
  explicit ConformalDensity(const SurfacePresentation& s) : surf_(&s) {}

  struct Bump {
    std::vector<DiskPoint> centers;  // orbit translates near the polygon
    double sigma = 0.5;
    double alpha = 0.0;
  };

  const SurfacePresentation* surf_ = nullptr;
  double scale_ = 1.0;
  std::vector<Bump> bumps_;
  std::vector<BumpSpec> specs_;
  int orbit_length_ = 0;
};

// Integral of f over the fundamental polygon w.r.t. Lebesgue dxdy, by
// curvilinear fan cells with tensor Gauss rules; error from one refinement.
QuadResult polygon_integral(const SurfacePresentation& s,
                            const std::function<double(const DiskPoint&)>& f);

// Area(rho) = integral of rho^2. Throws DensityError if the refinement
// estimate oscillates beyond 1%.
QuadResult area(const ConformalDensity& rho);

// L_rho of a chain of flow segments (= integral of rho/rho_X dt).
QuadResult length_along(const ConformalDensity& rho,
                        const std::vector<FlowSegment>& segs);
// L_rho of the geodesic segment between two points near the polygon.
QuadResult length_along(const ConformalDensity& rho, const DiskPoint& z,
                        const DiskPoint& w);

// Weighted sum of rho-lengths of the closed-geodesic representatives.
QuadResult curve_rho_length(const ConformalDensity& rho,
                            const WeightedMultiCurve& c);

// (1/T) integral of (rho/rho_X) along the flow from v.
double birkhoff_average(const ConformalDensity& rho, const UnitTangent& v,
                        double T);

// L_rho(G) / sqrt(Area(rho)); compare against hopf_bound.
double hopf_ratio(const ConformalDensity& rho, const WeightedMultiCurve& G);
double hopf_bound(const SurfacePresentation& s);  // (pi/2) sqrt(Area(X))

// (integral of rho*rho_X, sqrt(Area(rho)*Area(X))); first <= second.
std::pair<double, double> cauchy_schwarz_check(const ConformalDensity& rho);

}  // namespace extlen
