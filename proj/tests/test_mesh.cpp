#include "doctest.h"

#include <set>
#include <sstream>

#include "extlen/mesh.hpp"

using namespace extlen;

namespace {
const SurfacePresentation& octagon() {
  static SurfacePresentation s = build_surface(2);
  return s;
}
}  // namespace

TEST_CASE("grid fixture structure") {
  SurfaceMesh g = make_grid_fixture(2);
  CHECK(g.num_vertices() == 9);
  CHECK(g.edges.size() == 12);
  CHECK(g.rank == 0);
  CHECK(g.vertex_sets.at("left").size() == 3);
  CHECK(g.vertex_sets.at("right").size() == 3);
  for (const auto& e : g.edges) {
    CHECK(e.len == 1.0);
    CHECK(e.weight == 1.0);
    CHECK(e.cocycle.empty());
  }
  // no diagonals: every edge is axis-aligned of unit length
  for (const auto& e : g.edges)
    CHECK(std::abs(g.vpos[e.u] - g.vpos[e.v]) == doctest::Approx(1.0));
}

TEST_CASE("cylinder fixture structure and winding") {
  const int m = 4;
  SurfaceMesh c = make_cylinder_fixture(m);
  const int nx = 3 * m, ny = m;
  CHECK(c.num_vertices() == nx * (ny + 1));
  CHECK(c.edges.size() == static_cast<size_t>(nx * (ny + 1) + nx * ny));
  CHECK(c.rank == 1);
  // the bottom row traversed once picks up total winding 1
  int winding = 0, hits = 0;
  for (const auto& e : c.edges)
    if (!e.cocycle.empty()) {
      for (int l : e.cocycle.letters) winding += l;
      ++hits;
    }
  CHECK(hits == ny + 1);  // one seam edge per row
  CHECK(winding == ny + 1);
}

TEST_CASE("surface mesh invariants") {
  const auto& s = octagon();
  SurfaceMesh mesh = build_mesh(s, 0.25);

  CHECK(mesh.rank == 4);
  CHECK(mesh.euler_characteristic() == -2);
  CHECK(mesh.total_face_area() == doctest::Approx(s.area()).epsilon(1e-9));

  double wl2 = 0.0;
  for (const auto& e : mesh.edges) {
    CHECK(e.len > 0.0);
    CHECK(e.len <= 1.5 * 0.25);
    CHECK(e.weight > 0.0);
    wl2 += e.weight * e.len * e.len;
  }
  CHECK(wl2 == doctest::Approx(s.area()).epsilon(1e-12));

  for (double a : mesh.face_area) CHECK(a > 0.0);

  // exactly one quotient vertex sits at the polygon corner orbit
  int corner_classes = 0;
  for (const auto& p : mesh.vpos)
    for (const auto& q : s.polygon)
      if (std::abs(p - q) < 1e-9) {
        ++corner_classes;
        break;
      }
  CHECK(corner_classes == 1);
}

TEST_CASE("edge cocycles reproduce edge lengths on canonical lifts") {
  const auto& s = octagon();
  SurfaceMesh mesh = build_mesh(s, 0.3);
  int nontrivial = 0;
  for (const auto& e : mesh.edges) {
    DiskPoint lifted = s.evaluate(e.cocycle).apply(mesh.vpos[e.v]);
    CHECK(hyp_distance(mesh.vpos[e.u], lifted) ==
          doctest::Approx(e.len).epsilon(1e-9));
    if (!e.cocycle.empty()) ++nontrivial;
  }
  CHECK(nontrivial > 0);
}

TEST_CASE("mesh refinement scales vertex count like 1/h^2") {
  const auto& s = octagon();
  SurfaceMesh coarse = build_mesh(s, 0.4);
  SurfaceMesh fine = build_mesh(s, 0.2);
  double ratio = static_cast<double>(fine.num_vertices()) / coarse.num_vertices();
  CHECK(ratio > 2.5);
  CHECK(ratio < 6.5);
}

TEST_CASE("mesh serialization round trip") {
  const auto& s = octagon();
  for (const SurfaceMesh& mesh :
       {build_mesh(s, 0.35), make_grid_fixture(3), make_cylinder_fixture(3)}) {
    std::stringstream ss;
    save_mesh(mesh, ss);
    SurfaceMesh back = load_mesh(ss);
    REQUIRE(back.num_vertices() == mesh.num_vertices());
    REQUIRE(back.edges.size() == mesh.edges.size());
    REQUIRE(back.faces.size() == mesh.faces.size());
    CHECK(back.rank == mesh.rank);
    CHECK(back.h == mesh.h);
    CHECK((back.surf != nullptr) == (mesh.surf != nullptr));
    for (size_t i = 0; i < mesh.vpos.size(); ++i)
      CHECK(std::abs(back.vpos[i] - mesh.vpos[i]) < 1e-15);
    for (size_t e = 0; e < mesh.edges.size(); ++e) {
      CHECK(back.edges[e].u == mesh.edges[e].u);
      CHECK(back.edges[e].v == mesh.edges[e].v);
      CHECK(back.edges[e].len == doctest::Approx(mesh.edges[e].len));
      CHECK(back.edges[e].weight == doctest::Approx(mesh.edges[e].weight));
      CHECK(back.edges[e].cocycle.letters == mesh.edges[e].cocycle.letters);
    }
    CHECK(back.vertex_sets == mesh.vertex_sets);
  }
}
