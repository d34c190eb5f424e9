#pragma once

// Discrete extremal length on a surface mesh: edge metrics, homotopy-aware
// shortest cycles via truncated annular covers, snapping of weighted
// multi-curves onto the mesh, and the cutting-plane quadratic program for
// the extremal metric of a weighted multi-curve class.

#include <memory>
#include <string>

#include "extlen/flow.hpp"
#include "extlen/mesh.hpp"

namespace extlen {

struct ExtremalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// rho_e >= 0 per edge, indexed like SurfaceMesh::edges.
using EdgeMetric = std::vector<double>;

struct EdgePath {
  bool closed = true;
  // closed: v0 .. v_{k-1}, edge i joins v_i -> v_{i+1 mod k};
  // open:   v0 .. v_k,     edge i joins v_i -> v_{i+1}.
  std::vector<int> vertices;
  std::vector<int> edge_ids;
  GroupWord word;  // closed paths: product of edge cocycles from v0

  size_t size() const { return edge_ids.size(); }
};

double path_length(const SurfaceMesh& mesh, const EdgeMetric& rho,
                   const EdgePath& p);
double discrete_area(const SurfaceMesh& mesh, const EdgeMetric& rho);
// Recompute the cocycle product of a closed path.
GroupWord path_word(const SurfaceMesh& mesh, const EdgePath& p);

// A constraint class: either a free homotopy class of loops, given by a based
// edge loop, or the family of arcs joining two named vertex sets.
struct HomotopyClass {
  bool is_arc = false;
  EdgePath loop;          // used when !is_arc
  std::string from, to;   // used when is_arc
  double weight = 1.0;
};

struct PathResult {
  EdgePath path;
  double length = 0.0;
  bool certified = false;
};

// Shortest representative of the class in the metric rho. For loops on
// hyperbolic meshes this searches a truncated annular cover of the class,
// doubling the truncation radius until the optimum stabilizes (certify mode);
// the cheap mode reuses the current truncation and a single cut edge.
class HomotopyOracle {
 public:
  HomotopyOracle(const SurfaceMesh& mesh, const HomotopyClass& cls);
  HomotopyOracle(HomotopyOracle&&) noexcept;
  ~HomotopyOracle();
  // target: certification may stop early once a representative shorter than
  // target is found (it is then reported uncertified).
  // cert_tol: absolute precision to which the certified minimum is resolved;
  // looser values keep the covering-space truncation small.
  PathResult shortest(const EdgeMetric& rho, bool certify, double target = -1.0,
                      double cert_tol = 1e-9);
  // Up to k distinct short representatives (uncertified), best first. Useful
  // for adding several violated constraints per cutting-plane round.
  std::vector<PathResult> shortest_multi(const EdgeMetric& rho, int k);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

PathResult shortest_homotopic(const SurfaceMesh& mesh, const EdgeMetric& rho,
                              const HomotopyClass& cls, bool certify = true);

// Snap the closed geodesics of a weighted multi-curve onto mesh paths in the
// same free homotopy classes. Throws if the snapped class fails verification.
std::vector<HomotopyClass> snap_curve(const SurfaceMesh& mesh,
                                      const SurfacePresentation& s,
                                      const WeightedMultiCurve& curve);

struct SparseRow {
  std::vector<std::pair<int, double>> entries;  // (edge id, coefficient)
};

struct SolveOptions {
  double oracle_tol = 1e-7;  // constraint violation tolerance
  double kkt_tol = 1e-8;
  int max_cuts = 10000;       // cutting-plane rounds before giving up
  int cuts_per_round = 24;    // violated constraints added per round
  unsigned shuffle_seed = 0;  // nonzero: permute constraint order every round
};

struct SolveResult {
  EdgeMetric rho;
  double area = 0.0;
  double ext = 0.0;          // 1 / area
  double ext_lower = 0.0;    // certified bracket for the true discrete Ext
  double ext_upper = 0.0;
  int iterations = 0;
  double kkt = 0.0;
  bool converged = false;
  std::vector<SparseRow> rows;
  std::vector<double> lambda;
};

// Extremal metric of the weighted sum of classes: minimize the discrete area
// subject to sum_i w_i * (shortest rho-length of class i) >= 1.
SolveResult extremal_solve(const SurfaceMesh& mesh,
                           const std::vector<HomotopyClass>& classes,
                           const SolveOptions& opts = {});

struct TautReport {
  double covered_fraction = 1.0;  // of edges in supp(rho*)
  std::vector<int> uncovered;     // edges in the support off every taut path
};

// Every edge carrying positive rho* must lie on some active minimizing
// constraint path (taut multi-curve support).
TautReport taut_support_check(const SurfaceMesh& mesh, const SolveResult& res,
                              double tol = 1e-6);

}  // namespace extlen
