#pragma once

// Diameter-side consequences of extremal metrics: discrete diameters,
// the region inequality diam(C) <= L_rho(boundary C), the pants constant
// D' and the closed-form diameter bound 30(g-1)sqrt(D'), the
// hyperbolic-metric improvement experiment, and the singular-density
// example on the punctured ball B(0, 1/e).

#include <array>
#include <string>
#include <utility>

#include "extlen/extremal.hpp"

namespace extlen {

struct DiameterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Largest rho-distance over vertex pairs in the support of rho. Travel is
// restricted to edges with rho > 0; a metric supported on a non-spanning
// subgraph therefore reports +infinity. All pairs are scanned when the
// support has at most 3000 vertices, otherwise 500 farthest-point-sampled
// sources are used. Throws if rho has no positive area.
double discrete_diameter(const SurfaceMesh& mesh, const EdgeMetric& rho);

struct RegionReport {
  double diameter = 0.0;    // interior rho-diameter of the region
  double perimeter = 0.0;   // rho-length of the region boundary
  double tol_factor = 1.0;  // 1 + 5h mesh tolerance applied to the check
  bool violation = false;   // diameter > perimeter * tol_factor
};

// Interior diameter versus boundary length for a simply connected set of
// faces (checked by the Euler formula on the sub-complex); throws on a
// region that is empty, disconnected, or not a disk.
RegionReport region_check(const SurfaceMesh& mesh, const EdgeMetric& rho,
                          const std::vector<int>& region_faces);

struct ImprovementReport {
  double extremal_ratio = 0.0;    // certified ell_rho(c)/sqrt(Area(rho))
  double hyperbolic_ratio = 0.0;  // ell_hyp(c)/sqrt(Area(X))
  double margin = 0.0;            // extremal_ratio - hyperbolic_ratio
  bool conclusive = false;        // margin exceeds the solver bracket width
  SolveResult solve;
};

// Exhibit a conformal edge metric beating the hyperbolic metric for the
// length-over-sqrt-area ratio of the weighted multi-curve c. The metric is
// the computed extremal metric of c; a margin inside the solver bracket
// yields an inconclusive (but not failing) report.
ImprovementReport hyperbolic_not_extremal(const SurfaceMesh& mesh,
                                          const WeightedMultiCurve& c,
                                          const SolveOptions& opts = {});

struct PantsDecomposition {
  std::vector<GroupWord> cuffs;           // 3g-3 disjoint simple classes
  std::vector<std::array<int, 3>> pants;  // cuff index triples, 2g-2 rows
};

// The fixed genus-2 decomposition: cuffs {a1, a2, [a1, b1]}, pants
// {a1, a1, [a1,b1]} and {a2, a2, [a1,b1]}.
PantsDecomposition standard_pants(const SurfacePresentation& s);

struct PantsConstant {
  double dprime = 0.0;
  double h = 0.0;
  // (label, value) per extremal length entering the max; zero-convention
  // entries are omitted (they never attain a positive max).
  std::vector<std::pair<std::string, double>> components;
};

// D' = max over the pants P_i of the extremal lengths of their cuffs, and
// over the glued pieces along each cuff k of the extremal lengths of the
// arc families joining boundary cuffs through k. Cuffs are snapped to
// vertex-disjoint simple mesh cycles and the mesh is cut along them.
PantsConstant pants_constant(const SurfaceMesh& mesh,
                             const PantsDecomposition& pd,
                             const SolveOptions& opts = {});

struct DiameterBound {
  double total = 0.0;       // 30 (g-1) sqrt(D')
  double pants_term = 0.0;  // (2g-2) * 9 sqrt(D')
  double cuff_term = 0.0;   // (3g-3) * 4 sqrt(D')
};

// Closed-form bound for an area-1 extremal metric of a filling multi-curve.
DiameterBound diameter_bound(int genus, double dprime);

struct SingularReport {
  double area = 0.0;             // quadrature, exact value 2*pi
  double boundary_length = 0.0;  // quadrature on |z| = 1/e
  double boundary_stated = 0.0;  // the published value 2*pi*e
  bool boundary_discrepancy = false;
  // (epsilon, radial length from epsilon to 1/e); diverges like
  // log log(1/epsilon), hence the infinite diameter.
  std::vector<std::pair<double, double>> radial;
};

// rho-length of the radial segment [eps, 1/e] for rho = 1/(r log(1/r)),
// integrated in u = log(1/r) coordinates to tame the r -> 0 singularity.
double singular_radial_length(double eps);

// The density rho(z) = 1/(|z| log(1/|z|)) on B(0, 1/e): finite area,
// infinite diameter. Radial lengths are tabulated at eps = e^{-e^k},
// k = 1..4. The boundary-length row carries a discrepancy flag: direct
// quadrature gives 2*pi, the published value is 2*pi*e.
SingularReport singular_example();

}  // namespace extlen
