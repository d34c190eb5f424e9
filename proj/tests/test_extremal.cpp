#include "doctest.h"

#include <cmath>
#include <numeric>

#include "extlen/extremal.hpp"
#include "extlen/mesh.hpp"

using namespace extlen;

namespace {

const SurfacePresentation& octagon() {
  static SurfacePresentation s = build_surface(2);
  return s;
}

HomotopyClass grid_arc_class() {
  HomotopyClass c;
  c.is_arc = true;
  c.from = "left";
  c.to = "right";
  c.weight = 1.0;
  return c;
}

// core loop of the cylinder fixture: the bottom row traversed once
HomotopyClass cylinder_core_class(const SurfaceMesh& mesh, int m) {
  const int nx = 3 * m;
  HomotopyClass c;
  c.is_arc = false;
  c.weight = 1.0;
  c.loop.closed = true;
  for (int i = 0; i < nx; ++i) {
    c.loop.vertices.push_back(i);
    int e = mesh.edge_between(i, (i + 1) % nx);
    REQUIRE(e >= 0);
    c.loop.edge_ids.push_back(e);
  }
  c.loop.word = path_word(mesh, c.loop);
  return c;
}

EdgeMetric hyp_length_metric(const SurfaceMesh& mesh) {
  EdgeMetric len(mesh.edges.size());
  for (size_t e = 0; e < len.size(); ++e) len[e] = mesh.edges[e].len;
  return len;
}

double rel_l2(const EdgeMetric& a, const EdgeMetric& b) {
  REQUIRE(a.size() == b.size());
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += a[i] * a[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("grid fixtures solve exactly") {
  for (int k = 1; k <= 3; ++k) {
    CAPTURE(k);
    SurfaceMesh mesh = make_grid_fixture(k);
    SolveResult r = extremal_solve(mesh, {grid_arc_class()});
    CHECK(r.converged);
    CHECK(r.ext ==
          doctest::Approx(static_cast<double>(k) / (k + 1)).epsilon(1e-10));
    CHECK(r.kkt < 1e-8);
    CHECK(r.ext_lower <= r.ext + 1e-12);
    CHECK(r.ext <= r.ext_upper + 1e-12);
    TautReport taut = taut_support_check(mesh, r);
    CHECK(taut.covered_fraction == 1.0);
    CHECK(taut.uncovered.empty());
  }
}

TEST_CASE("cylinder fixtures solve exactly and refine toward the continuum") {
  double prev = 0.0;
  for (int m : {2, 4, 8}) {
    CAPTURE(m);
    SurfaceMesh mesh = make_cylinder_fixture(m);
    SolveResult r = extremal_solve(mesh, {cylinder_core_class(mesh, m)});
    CHECK(r.converged);
    double exact = 3.0 * m / (m + 1);
    CHECK(r.ext == doctest::Approx(exact).epsilon(1e-8));
    TautReport taut = taut_support_check(mesh, r);
    CHECK(taut.covered_fraction == 1.0);
    CHECK(r.ext > prev);  // increases toward the continuum value 3
    prev = r.ext;
  }
  CHECK(prev < 3.0);
}

TEST_CASE("shuffled constraint order leaves the metric unchanged") {
  SurfaceMesh mesh = make_cylinder_fixture(4);
  HomotopyClass cls = cylinder_core_class(mesh, 4);
  SolveOptions a, b;
  a.shuffle_seed = 12345;
  b.shuffle_seed = 987654321;
  SolveResult ra = extremal_solve(mesh, {cls}, a);
  SolveResult rb = extremal_solve(mesh, {cls}, b);
  CHECK(ra.converged);
  CHECK(rb.converged);
  CHECK(std::abs(ra.ext - rb.ext) < 1e-8);
  CHECK(rel_l2(ra.rho, rb.rho) < 1e-5);

  SurfaceMesh grid = make_grid_fixture(3);
  SolveResult ga = extremal_solve(grid, {grid_arc_class()}, a);
  SolveResult gb = extremal_solve(grid, {grid_arc_class()}, b);
  CHECK(std::abs(ga.ext - gb.ext) < 1e-8);
  CHECK(rel_l2(ga.rho, gb.rho) < 1e-5);
}

TEST_CASE("strip oracle brackets the geodesic length") {
  const auto& s = octagon();
  SurfaceMesh mesh = build_mesh(s, 0.3);
  WeightedMultiCurve a1{{{GroupWord{{1}}, 1.0}}};
  auto classes = snap_curve(mesh, s, a1);
  REQUIRE(classes.size() == 1);
  const double ell = s.geodesic_length(GroupWord{{1}});

  HomotopyOracle oracle(mesh, classes[0]);
  EdgeMetric len = hyp_length_metric(mesh);
  PathResult certified = oracle.shortest(len, true);
  CHECK(certified.certified);
  // graph paths cannot undercut the geodesic, and a reasonable mesh stays
  // within a modest factor of it
  CHECK(certified.length >= ell - 1e-9);
  CHECK(certified.length <= 1.3 * ell);
  // the cheap sweep reuses the same strip and cannot do better
  PathResult cheap = oracle.shortest(len, false);
  CHECK(cheap.length >= certified.length - 1e-12);

  auto multi = oracle.shortest_multi(len, 8);
  REQUIRE(!multi.empty());
  CHECK(multi.front().length == doctest::Approx(cheap.length));
  for (size_t i = 1; i < multi.size(); ++i)
    CHECK(multi[i].length >= multi[i - 1].length - 1e-12);
}

TEST_CASE("snapped doubled class costs twice the single class") {
  const auto& s = octagon();
  SurfaceMesh mesh = build_mesh(s, 0.3);
  WeightedMultiCurve a1{{{GroupWord{{1}}, 1.0}}};
  WeightedMultiCurve a1sq{{{GroupWord{{1, 1}}, 1.0}}};
  auto c1 = snap_curve(mesh, s, a1);
  auto c2 = snap_curve(mesh, s, a1sq);
  REQUIRE(c1.size() == 1);
  REQUIRE(c2.size() == 1);
  EdgeMetric len = hyp_length_metric(mesh);
  double l1 = shortest_homotopic(mesh, len, c1[0]).length;
  double l2 = shortest_homotopic(mesh, len, c2[0]).length;
  // the square wraps the same geodesic twice; the graph minimum follows suit
  CHECK(l2 == doctest::Approx(2.0 * l1).epsilon(1e-2));
}

TEST_CASE("systole class beats the hyperbolic baseline") {
  const auto& s = octagon();
  SurfaceMesh mesh = build_mesh(s, 0.3);
  auto classes = snap_curve(mesh, s, {{{GroupWord{{1}}, 1.0}}});
  SolveOptions opts;
  opts.oracle_tol = 1e-3;
  SolveResult r = extremal_solve(mesh, classes, opts);
  CHECK(r.converged);
  const double baseline =
      std::pow(s.geodesic_length(GroupWord{{1}}), 2) / s.area();
  CHECK(r.ext_lower > baseline);
  CHECK(r.ext_lower <= r.ext_upper);
  // the discrete estimate sits inside its own certified bracket
  CHECK(r.ext >= r.ext_lower - 1e-9);
  CHECK(r.ext <= r.ext_upper + 1e-3);
}
