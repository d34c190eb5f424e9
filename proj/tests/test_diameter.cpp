#include "doctest.h"

#include <cmath>
#include <set>

#include "extlen/diameter.hpp"

using namespace extlen;

namespace {

const SurfacePresentation& octagon() {
  static SurfacePresentation s = build_surface(2);
  return s;
}

const SurfaceMesh& coarse_mesh() {
  static SurfaceMesh m = build_mesh(octagon(), 0.3);
  return m;
}

EdgeMetric hyperbolic_metric(const SurfaceMesh& mesh) {
  EdgeMetric rho(mesh.edges.size());
  for (size_t e = 0; e < rho.size(); ++e) rho[e] = mesh.edges[e].len;
  return rho;
}

// Faces within the given dual-graph radius of the seed.
std::vector<int> face_ball(const SurfaceMesh& mesh, int seed, int radius) {
  std::map<int, std::vector<int>> efaces;
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& t = mesh.faces[f];
    for (int i = 0; i < 3; ++i)
      efaces[mesh.edge_between(t[i], t[(i + 1) % 3])].push_back(
          static_cast<int>(f));
  }
  std::vector<int> depth(mesh.faces.size(), -1);
  std::vector<int> frontier{seed}, out{seed};
  depth[seed] = 0;
  for (int d = 1; d <= radius; ++d) {
    std::vector<int> next;
    for (int f : frontier) {
      const auto& t = mesh.faces[f];
      for (int i = 0; i < 3; ++i)
        for (int g : efaces[mesh.edge_between(t[i], t[(i + 1) % 3])])
          if (depth[g] < 0) {
            depth[g] = d;
            next.push_back(g);
            out.push_back(g);
          }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace

TEST_CASE("closed-form diameter bound recomposes exactly") {
  DiameterBound b = diameter_bound(2, 1.0);
  CHECK(b.total == doctest::Approx(30.0).epsilon(1e-14));
  CHECK(b.pants_term == doctest::Approx(18.0).epsilon(1e-14));
  CHECK(b.cuff_term == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(std::abs(b.pants_term + b.cuff_term - b.total) < 1e-12);
  CHECK(diameter_bound(2, 4.0).total == doctest::Approx(60.0));
  CHECK(diameter_bound(3, 1.0).total == doctest::Approx(60.0));
  DiameterBound big = diameter_bound(5, 7.3);
  CHECK(std::abs(big.pants_term + big.cuff_term - big.total) < 1e-12);
  CHECK_THROWS_AS(diameter_bound(1, 1.0), DiameterError);
  CHECK_THROWS_AS(diameter_bound(2, -0.5), DiameterError);
}

TEST_CASE("singular density: area 2 pi, log log radial growth") {
  SingularReport rep = singular_example();
  CHECK(rep.area == doctest::Approx(2.0 * kPi).epsilon(1e-8));
  REQUIRE(rep.radial.size() == 4);
  for (int k = 1; k <= 4; ++k) {
    auto [eps, len] = rep.radial[k - 1];
    CHECK(eps == doctest::Approx(std::exp(-std::exp(double(k)))));
    double ratio = len / std::log(std::log(1.0 / eps));
    CHECK(ratio > 0.9);
    CHECK(ratio < 1.1);
  }
  // radial length diverges monotonically: the discrete diameter is infinite
  CHECK(rep.radial[3].second > rep.radial[0].second);
  // direct quadrature of the boundary length disagrees with the published
  // value 2 pi e and must be flagged, not asserted
  CHECK(rep.boundary_length == doctest::Approx(2.0 * kPi).epsilon(1e-8));
  CHECK(rep.boundary_stated == doctest::Approx(2.0 * kPi * std::exp(1.0)));
  CHECK(rep.boundary_discrepancy);
  CHECK_THROWS_AS(singular_radial_length(0.5), DiameterError);
  CHECK_THROWS_AS(singular_radial_length(0.0), DiameterError);
}

TEST_CASE("discrete diameter: scaling, monotonicity, disconnection") {
  SurfaceMesh grid = make_grid_fixture(3);
  EdgeMetric ones(grid.edges.size(), 1.0);
  double d1 = discrete_diameter(grid, ones);
  CHECK(d1 > 0.0);
  CHECK(std::isfinite(d1));

  EdgeMetric doubled(grid.edges.size(), 2.0);
  CHECK(discrete_diameter(grid, doubled) == doctest::Approx(2.0 * d1));

  EdgeMetric bumped = ones;
  bumped[0] += 0.5;
  CHECK(discrete_diameter(grid, bumped) >= d1 - 1e-12);

  // support on two far-apart edges: pairs across the gap are unreachable
  EdgeMetric sparse(grid.edges.size(), 0.0);
  sparse.front() = 1.0;
  sparse.back() = 1.0;
  CHECK(std::isinf(discrete_diameter(grid, sparse)));

  EdgeMetric zero(grid.edges.size(), 0.0);
  CHECK_THROWS_AS(discrete_diameter(grid, zero), DiameterError);

  // hyperbolic edge lengths: finite and stable under refinement
  double coarse = discrete_diameter(coarse_mesh(), hyperbolic_metric(coarse_mesh()));
  SurfaceMesh fine = build_mesh(octagon(), 0.15);
  double refined = discrete_diameter(fine, hyperbolic_metric(fine));
  CHECK(std::isfinite(coarse));
  CHECK(std::abs(refined - coarse) / coarse < 0.02);
}

TEST_CASE("region inequality on the hyperbolic metric") {
  const SurfaceMesh& mesh = coarse_mesh();
  EdgeMetric rho = hyperbolic_metric(mesh);

  RegionReport tri = region_check(mesh, rho, {0});
  CHECK(tri.perimeter > 0.0);
  CHECK(tri.diameter <= tri.perimeter);
  CHECK(!tri.violation);
  CHECK(tri.tol_factor == doctest::Approx(1.0 + 5.0 * mesh.h));

  std::vector<int> ball = face_ball(mesh, 17, 3);
  RegionReport rep = region_check(mesh, rho, ball);
  CHECK(rep.diameter > 0.0);
  CHECK(!rep.violation);

  // puncturing the ball leaves an annulus: not simply connected
  std::vector<int> punctured(ball.begin() + 1, ball.end());
  CHECK_THROWS_AS(region_check(mesh, rho, punctured), DiameterError);
  CHECK_THROWS_AS(region_check(mesh, rho, {}), DiameterError);
  CHECK_THROWS_AS(region_check(mesh, rho, {0, 0}), DiameterError);
}

TEST_CASE("extremal metrics beat the hyperbolic baseline") {
  SolveOptions opts;
  opts.oracle_tol = 1e-3;

  WeightedMultiCurve a1;
  a1.components.push_back({GroupWord({1}), 1.0});
  ImprovementReport rep = hyperbolic_not_extremal(coarse_mesh(), a1, opts);
  CHECK(rep.solve.converged);
  CHECK(rep.margin > 0.0);
  CHECK(rep.conclusive);
  CHECK(rep.extremal_ratio > rep.hyperbolic_ratio);

  // the extremal metric of the systole class, rescaled to unit area, has a
  // finite diameter: its support is a spanning annulus
  EdgeMetric rho = rep.solve.rho;
  double scale = 1.0 / std::sqrt(rep.solve.area);
  for (double& r : rho) r *= scale;
  double diam = discrete_diameter(coarse_mesh(), rho);
  CHECK(std::isfinite(diam));

  // the figure-eight class a1 b1 (non-simple candidate) gives a margin too
  WeightedMultiCurve fig8;
  fig8.components.push_back({GroupWord({1, 2}), 1.0});
  ImprovementReport rep8 = hyperbolic_not_extremal(coarse_mesh(), fig8, opts);
  CHECK(rep8.solve.converged);
  CHECK(rep8.margin > 0.0);

  CHECK_THROWS_AS(hyperbolic_not_extremal(coarse_mesh(), WeightedMultiCurve{},
                                          opts),
                  DiameterError);
}

TEST_CASE("pants constant: positive, handle-symmetric, golden value") {
  SolveOptions opts;
  opts.oracle_tol = 1e-4;
  PantsDecomposition pd = standard_pants(octagon());
  REQUIRE(pd.cuffs.size() == 3);
  REQUIRE(pd.pants.size() == 2);

  PantsConstant pc = pants_constant(coarse_mesh(), pd, opts);
  CHECK(pc.dprime > 0.0);
  CHECK(std::isfinite(pc.dprime));
  // 3 cuff classes per pants, one through-arc family per handle gluing,
  // and all boundary pairs across the separating gluing
  CHECK(pc.components.size() == 18);

  auto value = [&](const std::string& label) {
    for (const auto& [name, v] : pc.components)
      if (name == label) return v;
    FAIL("missing component ", label);
    return 0.0;
  };
  // swapping the two handles is a mesh symmetry of the regular octagon
  CHECK(value("Ext_P0(cuff0#0)") ==
        doctest::Approx(value("Ext_P1(cuff1#0)")).epsilon(1e-3));
  CHECK(value("Ext_P0(cuff2#0)") ==
        doctest::Approx(value("Ext_P1(cuff2#0)")).epsilon(1e-3));
  CHECK(value("Ext_G0(cuff2#0,cuff2#0)") ==
        doctest::Approx(value("Ext_G1(cuff2#0,cuff2#0)")).epsilon(1e-3));
  // golden value at h = 0.3 (recorded from the first converged run)
  CHECK(pc.dprime == doctest::Approx(8.081487).epsilon(1e-3));

  DiameterBound b = diameter_bound(2, pc.dprime);
  CHECK(b.total == doctest::Approx(30.0 * std::sqrt(pc.dprime)).epsilon(1e-14));
}
