#pragma once

// Triangulated model of the surface: a fan grid over the fundamental polygon
// with boundary nodes identified across side pairings. The quotient graph
// carries hyperbolic edge lengths, dual-area weights, and a deck cocycle per
// directed edge so that loops know their free homotopy class. Flat fixture
// meshes (grid quadrilateral, cylinder) use the same container with explicit
// weights and an integer-rank cocycle.

#include <array>
#include <map>
#include <memory>

#include "extlen/surface.hpp"

namespace extlen {

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MeshEdge {
  int u = 0, v = 0;
  double len = 0.0;     // hyperbolic (or flat fixture) length
  double weight = 0.0;  // coefficient of rho_e^2 in the discrete area
  GroupWord cocycle;    // deck word picked up traversing u -> v
};

struct SurfaceMesh {
  int rank = 0;    // cocycle alphabet size: 2*genus, 1 for the cylinder, 0 flat
  double h = 0.0;  // target edge length
  std::vector<DiskPoint> vpos;  // canonical representative per quotient vertex
  std::vector<MeshEdge> edges;
  std::vector<std::array<int, 3>> faces;  // quotient vertex ids
  std::vector<double> face_area;
  std::map<std::string, std::vector<int>> vertex_sets;  // named boundary sets

  // Set for meshes built from a presentation; fixtures leave it null.
  std::shared_ptr<SurfacePresentation> surf;

  // adjacency[v] = (edge id, +1 if traversed u->v from v==edges[e].u else -1)
  std::vector<std::vector<std::pair<int, int>>> adj;
  void build_adjacency();

  int num_vertices() const { return static_cast<int>(vpos.size()); }
  int euler_characteristic() const {
    return num_vertices() - static_cast<int>(edges.size()) +
           static_cast<int>(faces.size());
  }
  int edge_between(int u, int v) const;  // -1 if absent
  // Cocycle word of traversing edge e in direction dir (+1: u->v).
  GroupWord edge_word(int e, int dir) const;
  double total_face_area() const;
};

// Fan-grid mesh of the closed surface, target edge length h in [0.01, 1].
SurfaceMesh build_mesh(const SurfacePresentation& s, double h);

// Flat k x k unit-square grid quadrilateral, unit lengths and weights,
// vertex sets "left" and "right". No faces, rank 0.
SurfaceMesh make_grid_fixture(int k);

// Flat cylinder of circumference c = 3 and height 1 on a (3m) x m square
// grid, unit weights, seam edges carry cocycle letter 1. Rank 1.
SurfaceMesh make_cylinder_fixture(int m);

void save_mesh(const SurfaceMesh& mesh, std::ostream& os);
SurfaceMesh load_mesh(std::istream& is);

}  // namespace extlen
