#include "extlen/diameter.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>

namespace extlen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dijkstra from src over the edges with allowed[e] != 0 (all edges when
// allowed is empty), cost rho. Returns the distance array.
std::vector<double> dijkstra_dist(const SurfaceMesh& mesh,
                                  const EdgeMetric& rho,
                                  const std::vector<char>& allowed, int src) {
  std::vector<double> d(mesh.num_vertices(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  d[src] = 0.0;
  pq.push({0.0, src});
  while (!pq.empty()) {
    auto [dd, v] = pq.top();
    pq.pop();
    if (dd > d[v]) continue;
    for (auto [e, dir] : mesh.adj[v]) {
      if (!allowed.empty() && !allowed[e]) continue;
      int to = dir > 0 ? mesh.edges[e].v : mesh.edges[e].u;
      double nd = dd + std::max(0.0, rho[e]);
      if (nd < d[to]) {
        d[to] = nd;
        pq.push({nd, to});
      }
    }
  }
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// discrete_diameter

double discrete_diameter(const SurfaceMesh& mesh, const EdgeMetric& rho) {
  if (rho.size() != mesh.edges.size())
    throw DiameterError("discrete_diameter: metric size mismatch");
  if (!(discrete_area(mesh, rho) > 0.0))
    throw DiameterError("discrete_diameter: metric has no positive area");
  std::vector<char> support(mesh.edges.size(), 0);
  std::vector<char> on(mesh.num_vertices(), 0);
  for (size_t e = 0; e < rho.size(); ++e) {
    if (!(rho[e] > 0.0)) continue;
    support[e] = 1;
    on[mesh.edges[e].u] = 1;
    on[mesh.edges[e].v] = 1;
  }
  std::vector<int> verts;
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (on[v]) verts.push_back(v);
  if (verts.empty())
    throw DiameterError("discrete_diameter: metric has empty support");

  auto ecc = [&](int src) {
    std::vector<double> d = dijkstra_dist(mesh, rho, support, src);
    double m = 0.0;
    for (int v : verts) {
      if (!std::isfinite(d[v])) return kInf;  // support disconnected
      m = std::max(m, d[v]);
    }
    return m;
  };

  if (verts.size() <= 3000) {
    double diam = 0.0;
    for (int v : verts) {
      diam = std::max(diam, ecc(v));
      if (!std::isfinite(diam)) return kInf;
    }
    return diam;
  }

  // Farthest-point sampling: 500 sources, each the vertex currently
  // farthest from the chosen set.
  std::vector<double> mind(mesh.num_vertices(), kInf);
  int src = verts.front();
  double diam = 0.0;
  for (int round = 0; round < 500; ++round) {
    std::vector<double> d = dijkstra_dist(mesh, rho, support, src);
    int far = -1;
    double farv = -1.0;
    for (int v : verts) {
      if (!std::isfinite(d[v])) return kInf;
      diam = std::max(diam, d[v]);
      mind[v] = std::min(mind[v], d[v]);
      if (mind[v] > farv) {
        farv = mind[v];
        far = v;
      }
    }
    if (farv <= 0.0) break;  // set is an exact cover
    src = far;
  }
  return diam;
}

// ---------------------------------------------------------------------------
// region_check

namespace {

// The three edge ids of a face, via the mesh lookup.
std::array<int, 3> face_edge_ids(const SurfaceMesh& mesh, int f) {
  const auto& t = mesh.faces[f];
  std::array<int, 3> out{};
  for (int i = 0; i < 3; ++i) {
    out[i] = mesh.edge_between(t[i], t[(i + 1) % 3]);
    if (out[i] < 0) throw DiameterError("face edge missing from mesh");
  }
  return out;
}

}  // namespace

RegionReport region_check(const SurfaceMesh& mesh, const EdgeMetric& rho,
                          const std::vector<int>& region_faces) {
  if (rho.size() != mesh.edges.size())
    throw DiameterError("region_check: metric size mismatch");
  if (region_faces.empty())
    throw DiameterError("region_check: empty region");
  std::vector<char> in_region(mesh.faces.size(), 0);
  for (int f : region_faces) {
    if (f < 0 || f >= static_cast<int>(mesh.faces.size()))
      throw DiameterError("region_check: face id out of range");
    if (in_region[f]) throw DiameterError("region_check: duplicate face id");
    in_region[f] = 1;
  }

  // Sub-complex census and edge multiplicity within the region.
  std::map<int, int> edge_count;
  std::set<int> vset;
  for (int f : region_faces) {
    for (int e : face_edge_ids(mesh, f)) ++edge_count[e];
    for (int v : mesh.faces[f]) vset.insert(v);
  }

  // Connectivity over shared edges.
  std::map<int, std::vector<int>> edge_faces;
  for (int f : region_faces)
    for (int e : face_edge_ids(mesh, f)) edge_faces[e].push_back(f);
  std::vector<int> stack{region_faces.front()};
  std::set<int> seen{region_faces.front()};
  while (!stack.empty()) {
    int f = stack.back();
    stack.pop_back();
    for (int e : face_edge_ids(mesh, f))
      for (int g : edge_faces[e])
        if (!seen.count(g)) {
          seen.insert(g);
          stack.push_back(g);
        }
  }
  long chi = static_cast<long>(vset.size()) -
             static_cast<long>(edge_count.size()) +
             static_cast<long>(region_faces.size());
  if (seen.size() != region_faces.size() || chi != 1)
    throw DiameterError("region_check: region is not a simply connected disk");

  RegionReport rep;
  rep.tol_factor = 1.0 + 5.0 * mesh.h;
  std::vector<char> allowed(mesh.edges.size(), 0);
  for (auto [e, cnt] : edge_count) {
    allowed[e] = 1;
    if (cnt == 1) rep.perimeter += std::max(0.0, rho[e]);
  }
  for (int v : vset) {
    std::vector<double> d = dijkstra_dist(mesh, rho, allowed, v);
    for (int w : vset)
      if (std::isfinite(d[w])) rep.diameter = std::max(rep.diameter, d[w]);
  }
  rep.violation = rep.diameter > rep.perimeter * rep.tol_factor + 1e-12;
  return rep;
}

// ---------------------------------------------------------------------------
// hyperbolic_not_extremal

ImprovementReport hyperbolic_not_extremal(const SurfaceMesh& mesh,
                                          const WeightedMultiCurve& c,
                                          const SolveOptions& opts) {
  if (!mesh.surf)
    throw DiameterError("hyperbolic_not_extremal: mesh carries no surface");
  if (c.components.empty())
    throw DiameterError("hyperbolic_not_extremal: trivial multi-curve");
  const SurfacePresentation& s = *mesh.surf;
  std::vector<HomotopyClass> classes = snap_curve(mesh, s, c);

  ImprovementReport rep;
  rep.solve = extremal_solve(mesh, classes, opts);
  double lhyp = 0.0;
  for (const CurveComponent& comp : c.components)
    lhyp += comp.weight * s.geodesic_length(comp.word);
  rep.hyperbolic_ratio = lhyp / std::sqrt(s.area());
  rep.extremal_ratio = std::sqrt(std::max(0.0, rep.solve.ext_lower));
  rep.margin = rep.extremal_ratio - rep.hyperbolic_ratio;
  double upper = std::sqrt(std::max(rep.solve.ext_upper, 0.0));
  double bracket = std::max(0.0, upper - rep.extremal_ratio);
  rep.conclusive = rep.solve.converged && rep.margin > bracket;
  return rep;
}

// ---------------------------------------------------------------------------
// pants decomposition and cutting

PantsDecomposition standard_pants(const SurfacePresentation& s) {
  if (s.genus != 2)
    throw DiameterError("standard_pants: only the genus-2 decomposition ships");
  PantsDecomposition pd;
  pd.cuffs.push_back(GroupWord({1}));              // a1
  pd.cuffs.push_back(GroupWord({3}));              // a2
  pd.cuffs.push_back(GroupWord({1, 2, -1, -2}));   // separating [a1, b1]
  pd.pants.push_back({0, 0, 2});
  pd.pants.push_back({1, 1, 2});
  return pd;
}

namespace {

bool vertex_simple(const EdgePath& p) {
  std::set<int> seen(p.vertices.begin(), p.vertices.end());
  return seen.size() == p.vertices.size();
}

// Snap each cuff class to a vertex-simple mesh cycle, rerouting with edge
// penalties so the realizations are pairwise vertex-disjoint.
std::vector<EdgePath> snap_disjoint_cuffs(const SurfaceMesh& mesh,
                                          const PantsDecomposition& pd) {
  const SurfacePresentation& s = *mesh.surf;
  double max_len = 0.0;
  for (const MeshEdge& e : mesh.edges) max_len = std::max(max_len, e.len);
  std::vector<char> used(mesh.num_vertices(), 0);
  std::mt19937 rng(20260826u);
  std::uniform_real_distribution<double> jit(0.0, 1.0);

  std::vector<EdgePath> out;
  for (const GroupWord& w : pd.cuffs) {
    WeightedMultiCurve one;
    one.components.push_back({w, 1.0});
    HomotopyClass cls = snap_curve(mesh, s, one).front();
    HomotopyOracle oracle(mesh, cls);
    EdgePath chosen;
    double penalty = 100.0 * max_len;
    bool ok = false;
    for (int attempt = 0; attempt < 6 && !ok; ++attempt, penalty *= 10.0) {
      EdgeMetric rho(mesh.edges.size());
      for (size_t e = 0; e < rho.size(); ++e) {
        rho[e] = mesh.edges[e].len * (1.0 + 1e-9 * jit(rng));
        if (used[mesh.edges[e].u] || used[mesh.edges[e].v]) rho[e] += penalty;
      }
      PathResult pr = oracle.shortest(rho, true, -1.0, 1e-6);
      bool disjoint = true;
      for (int v : pr.path.vertices)
        if (used[v]) disjoint = false;
      if (disjoint && vertex_simple(pr.path)) {
        chosen = pr.path;
        ok = true;
      }
    }
    if (!ok)
      throw DiameterError(
          "pants_constant: could not realize disjoint simple cuffs");
    for (int v : chosen.vertices) used[v] = 1;
    out.push_back(std::move(chosen));
  }
  return out;
}

struct CutPiece {
  SurfaceMesh sub;               // rank 0, cocycles cleared, no surface
  std::vector<int> orig_vertex;  // sub vertex -> parent vertex
  std::vector<int> orig_edge;    // sub edge -> parent edge
  std::vector<std::string> boundary_names;  // "cuff<i>#<n>" sets present
};

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

// Cut the mesh along the cuffs listed in cut_ids: faces are grouped into
// components across non-cut edges, and cuff vertices/edges are duplicated
// once per incident wedge. Boundary copies get vertex sets "cuff<i>#<n>";
// vertices on uncut cuffs get the set "glue<i>".
std::vector<CutPiece> cut_along(const SurfaceMesh& mesh,
                                const std::vector<EdgePath>& cuffs,
                                const std::vector<int>& cut_ids) {
  const int E = static_cast<int>(mesh.edges.size());
  const int F = static_cast<int>(mesh.faces.size());
  std::vector<int> edge_cuff(E, -1), vert_cuff(mesh.num_vertices(), -1);
  for (size_t c = 0; c < cuffs.size(); ++c)
    for (int v : cuffs[c].vertices) vert_cuff[v] = static_cast<int>(c);
  std::vector<char> is_cut_edge(E, 0);
  for (int c : cut_ids)
    for (int e : cuffs[c].edge_ids) {
      edge_cuff[e] = c;
      is_cut_edge[e] = 1;
    }

  std::vector<std::array<int, 3>> fedges(F);
  std::vector<std::array<int, 2>> efaces(E, {-1, -1});
  for (int f = 0; f < F; ++f) {
    fedges[f] = face_edge_ids(mesh, f);
    for (int e : fedges[f]) {
      if (efaces[e][0] < 0)
        efaces[e][0] = f;
      else if (efaces[e][1] < 0)
        efaces[e][1] = f;
      else
        throw DiameterError("cut_along: edge with more than two faces");
    }
  }

  // Face components across non-cut edges.
  std::vector<int> comp(F, -1);
  int ncomp = 0;
  for (int f0 = 0; f0 < F; ++f0) {
    if (comp[f0] >= 0) continue;
    comp[f0] = ncomp;
    std::vector<int> stack{f0};
    while (!stack.empty()) {
      int f = stack.back();
      stack.pop_back();
      for (int e : fedges[f]) {
        if (is_cut_edge[e]) continue;
        for (int g : efaces[e])
          if (g >= 0 && comp[g] < 0) {
            comp[g] = ncomp;
            stack.push_back(g);
          }
      }
    }
    ++ncomp;
  }

  // Wedges: corners (3f + i) merged across shared non-cut edges.
  Dsu dsu(3 * F);
  auto corner = [&](int f, int v) {
    for (int i = 0; i < 3; ++i)
      if (mesh.faces[f][i] == v) return 3 * f + i;
    throw DiameterError("cut_along: corner lookup failed");
  };
  for (int e = 0; e < E; ++e) {
    if (is_cut_edge[e] || efaces[e][1] < 0) continue;
    int f = efaces[e][0], g = efaces[e][1];
    dsu.unite(corner(f, mesh.edges[e].u), corner(g, mesh.edges[e].u));
    dsu.unite(corner(f, mesh.edges[e].v), corner(g, mesh.edges[e].v));
  }

  std::vector<CutPiece> out(ncomp);
  for (int c = 0; c < ncomp; ++c) {
    CutPiece& piece = out[c];
    SurfaceMesh& sub = piece.sub;
    sub.rank = 0;
    sub.h = mesh.h;

    std::map<int, int> wedge_vertex;  // dsu root -> sub vertex id
    auto sub_vertex = [&](int f, int v) {
      int root = dsu.find(corner(f, v));
      auto it = wedge_vertex.find(root);
      if (it != wedge_vertex.end()) return it->second;
      int id = static_cast<int>(sub.vpos.size());
      wedge_vertex.emplace(root, id);
      sub.vpos.push_back(mesh.vpos[v]);
      piece.orig_vertex.push_back(v);
      return id;
    };
    std::map<std::pair<int, int>, int> edge_ids;
    auto sub_edge = [&](int f, int e) {
      int nu = sub_vertex(f, mesh.edges[e].u);
      int nv = sub_vertex(f, mesh.edges[e].v);
      auto key = std::minmax(nu, nv);
      auto it = edge_ids.find(key);
      if (it != edge_ids.end()) return it->second;
      MeshEdge me;
      me.u = nu;
      me.v = nv;
      me.len = mesh.edges[e].len;
      // A duplicated cut edge carries half the dual area of the original.
      me.weight = mesh.edges[e].weight * (is_cut_edge[e] ? 0.5 : 1.0);
      int id = static_cast<int>(sub.edges.size());
      edge_ids.emplace(key, id);
      sub.edges.push_back(me);
      piece.orig_edge.push_back(e);
      return id;
    };
    for (int f = 0; f < F; ++f) {
      if (comp[f] != c) continue;
      for (int e : fedges[f]) sub_edge(f, e);
      sub.faces.push_back({sub_vertex(f, mesh.faces[f][0]),
                           sub_vertex(f, mesh.faces[f][1]),
                           sub_vertex(f, mesh.faces[f][2])});
      sub.face_area.push_back(f < static_cast<int>(mesh.face_area.size())
                                  ? mesh.face_area[f]
                                  : 0.0);
    }
    sub.build_adjacency();

    // Boundary components per cut cuff, named "cuff<i>#<n>".
    for (int cuff : cut_ids) {
      std::vector<int> members;
      for (int v = 0; v < sub.num_vertices(); ++v)
        if (vert_cuff[piece.orig_vertex[v]] == cuff) members.push_back(v);
      if (members.empty()) continue;
      // Group along duplicated cuff edges.
      Dsu grp(sub.num_vertices());
      for (size_t e = 0; e < sub.edges.size(); ++e)
        if (edge_cuff[piece.orig_edge[e]] == cuff)
          grp.unite(sub.edges[e].u, sub.edges[e].v);
      std::map<int, std::vector<int>> groups;
      for (int v : members) groups[grp.find(v)].push_back(v);
      int n = 0;
      for (auto& [root, vs] : groups) {
        std::string name = "cuff" + std::to_string(cuff) + "#" +
                           std::to_string(n++);
        sub.vertex_sets[name] = vs;
        piece.boundary_names.push_back(name);
      }
    }
    // Interior snapped cuffs (not cut) become glue waypoints.
    for (size_t cuff = 0; cuff < cuffs.size(); ++cuff) {
      if (std::find(cut_ids.begin(), cut_ids.end(), static_cast<int>(cuff)) !=
          cut_ids.end())
        continue;
      std::vector<int> members;
      for (int v = 0; v < sub.num_vertices(); ++v)
        if (vert_cuff[piece.orig_vertex[v]] == static_cast<int>(cuff))
          members.push_back(v);
      if (!members.empty())
        sub.vertex_sets["glue" + std::to_string(cuff)] = members;
    }
  }
  return out;
}

// Consistent counterclockwise orientation flags (0 keep, 1 reverse) via
// breadth-first propagation over shared edges.
std::vector<char> orient_faces(const SurfaceMesh& sub) {
  const int F = static_cast<int>(sub.faces.size());
  std::vector<std::array<int, 3>> fedges(F);
  std::map<int, std::vector<int>> efaces;
  for (int f = 0; f < F; ++f) {
    fedges[f] = face_edge_ids(sub, f);
    for (int e : fedges[f]) efaces[e].push_back(f);
  }
  // Direction face f induces on edge e: +1 if (u, v) in face order.
  auto induced = [&](int f, int e, int flip) {
    const auto& t = sub.faces[f];
    int u = sub.edges[e].u, v = sub.edges[e].v;
    for (int i = 0; i < 3; ++i) {
      if (t[i] == u && t[(i + 1) % 3] == v) return flip ? -1 : +1;
      if (t[i] == v && t[(i + 1) % 3] == u) return flip ? +1 : -1;
    }
    throw DiameterError("orient_faces: edge not on face");
  };
  std::vector<char> flip(F, 0), done(F, 0);
  for (int f0 = 0; f0 < F; ++f0) {
    if (done[f0]) continue;
    done[f0] = 1;
    std::vector<int> stack{f0};
    while (!stack.empty()) {
      int f = stack.back();
      stack.pop_back();
      for (int e : fedges[f]) {
        for (int g : efaces[e]) {
          if (g == f) continue;
          int want = -induced(f, e, flip[f]);  // neighbors oppose on e
          if (!done[g]) {
            flip[g] = induced(g, e, 0) == want ? 0 : 1;
            done[g] = 1;
            stack.push_back(g);
          } else if (induced(g, e, flip[g]) != want) {
            throw DiameterError("orient_faces: non-orientable piece");
          }
        }
      }
    }
  }
  return flip;
}

// Install a rank-1 winding cocycle on sub: a dual arc from the boundary
// component `from` to the boundary component `to`, realized as +/-1 letters
// on the crossed edges, including one boundary edge at each end so the
// total is a closed cocycle. Loops then carry their winding around `from`.
void install_winding(SurfaceMesh& sub, const std::string& from,
                     const std::string& to) {
  const int F = static_cast<int>(sub.faces.size());
  std::vector<std::array<int, 3>> fedges(F);
  std::map<int, std::vector<int>> efaces;
  for (int f = 0; f < F; ++f) {
    fedges[f] = face_edge_ids(sub, f);
    for (int e : fedges[f]) efaces[e].push_back(f);
  }
  std::vector<char> flip = orient_faces(sub);
  auto left_face = [&](int e, int u, int v) {
    // The face for which (u, v) lies in its oriented boundary.
    for (int f : efaces[e]) {
      const auto& t = sub.faces[f];
      for (int i = 0; i < 3; ++i) {
        int a = t[i], b = t[(i + 1) % 3];
        if (flip[f]) std::swap(a, b);
        if (a == u && b == v) return f;
      }
    }
    return -1;
  };
  auto set_membership = [&](const std::string& name) {
    auto it = sub.vertex_sets.find(name);
    if (it == sub.vertex_sets.end())
      throw DiameterError("install_winding: unknown boundary set " + name);
    std::vector<char> in(sub.num_vertices(), 0);
    for (int v : it->second) in[v] = 1;
    return in;
  };
  std::vector<char> in_from = set_membership(from), in_to = set_membership(to);
  auto pick_boundary_edge = [&](const std::vector<char>& in) {
    for (size_t e = 0; e < sub.edges.size(); ++e)
      if (efaces[static_cast<int>(e)].size() == 1 && in[sub.edges[e].u] &&
          in[sub.edges[e].v])
        return static_cast<int>(e);
    throw DiameterError("install_winding: boundary set has no boundary edge");
  };
  int e_from = pick_boundary_edge(in_from);
  int e_to = pick_boundary_edge(in_to);
  int f_start = efaces[e_from].front();
  int f_goal = efaces[e_to].front();

  // Dual breadth-first path across interior edges.
  std::vector<std::pair<int, int>> prev(F, {-1, -1});  // (face, edge)
  std::vector<char> seen(F, 0);
  std::queue<int> bfs;
  seen[f_start] = 1;
  bfs.push(f_start);
  while (!bfs.empty() && !seen[f_goal]) {
    int f = bfs.front();
    bfs.pop();
    for (int e : fedges[f]) {
      if (efaces[e].size() != 2) continue;
      int g = efaces[e][0] == f ? efaces[e][1] : efaces[e][0];
      if (seen[g]) continue;
      seen[g] = 1;
      prev[g] = {f, e};
      bfs.push(g);
      if (g == f_goal) break;
    }
  }
  if (!seen[f_goal])
    throw DiameterError("install_winding: boundary components not connected");

  for (MeshEdge& e : sub.edges) e.cocycle = GroupWord();
  // Crossing sign: traversing e as u -> v picks up +1 when the arc step
  // fa -> fb crosses it from the left of (u, v).
  auto assign = [&](int e, int fa) {
    int f_left = left_face(e, sub.edges[e].u, sub.edges[e].v);
    sub.edges[e].cocycle = GroupWord({f_left == fa ? +1 : -1});
  };
  // Arc orientation: hole(from) -> f_start -> ... -> f_goal -> hole(to).
  if (left_face(e_from, sub.edges[e_from].u, sub.edges[e_from].v) ==
      f_start)
    sub.edges[e_from].cocycle = GroupWord({-1});
  else
    sub.edges[e_from].cocycle = GroupWord({+1});
  for (int f = f_goal; f != f_start; f = prev[f].first) assign(prev[f].second, prev[f].first);
  assign(e_to, f_goal);
  sub.rank = 1;
}

// Closed boundary walk of the named vertex set (each vertex meets exactly
// two boundary edges of its cuff copy).
EdgePath boundary_loop(const SurfaceMesh& sub, const std::string& name) {
  auto it = sub.vertex_sets.find(name);
  if (it == sub.vertex_sets.end())
    throw DiameterError("boundary_loop: unknown vertex set " + name);
  std::vector<char> in(sub.num_vertices(), 0);
  for (int v : it->second) in[v] = 1;
  std::vector<int> face_count(sub.edges.size(), 0);
  for (size_t f = 0; f < sub.faces.size(); ++f)
    for (int e : face_edge_ids(sub, static_cast<int>(f))) ++face_count[e];
  std::vector<std::vector<std::pair<int, int>>> link(sub.num_vertices());
  for (size_t e = 0; e < sub.edges.size(); ++e) {
    if (face_count[e] != 1) continue;  // boundary edges only
    int u = sub.edges[e].u, v = sub.edges[e].v;
    if (!in[u] || !in[v]) continue;
    link[u].push_back({static_cast<int>(e), v});
    link[v].push_back({static_cast<int>(e), u});
  }
  int start = it->second.front();
  if (link[start].size() != 2)
    throw DiameterError("boundary_loop: boundary walk is not a cycle");
  EdgePath p;
  p.closed = true;
  int v = start, via = -1;
  do {
    if (link[v].size() != 2)
      throw DiameterError("boundary_loop: boundary walk is not a cycle");
    auto [e, w] = link[v][0].first == via ? link[v][1] : link[v][0];
    p.vertices.push_back(v);
    p.edge_ids.push_back(e);
    via = e;
    v = w;
  } while (v != start);
  if (p.vertices.size() != it->second.size())
    throw DiameterError("boundary_loop: boundary walk misses vertices");
  p.word = path_word(sub, p);
  return p;
}

int path_winding(const SurfaceMesh& sub, const EdgePath& p) {
  int w = 0;
  for (size_t i = 0; i < p.edge_ids.size(); ++i) {
    int e = p.edge_ids[i];
    int dir = sub.edges[e].u == p.vertices[i] ? +1 : -1;
    for (int l : sub.edge_word(e, dir).letters) w += l;
  }
  return w;
}

}  // namespace

PantsConstant pants_constant(const SurfaceMesh& mesh,
                             const PantsDecomposition& pd,
                             const SolveOptions& opts) {
  if (!mesh.surf)
    throw DiameterError("pants_constant: mesh carries no surface");
  const int g = mesh.surf->genus;
  if (static_cast<int>(pd.cuffs.size()) != 3 * g - 3 ||
      static_cast<int>(pd.pants.size()) != 2 * g - 2)
    throw DiameterError("pants_constant: decomposition has the wrong shape");

  PantsConstant out;
  out.h = mesh.h;
  std::vector<EdgePath> cuffs = snap_disjoint_cuffs(mesh, pd);

  std::vector<int> all_ids(pd.cuffs.size());
  std::iota(all_ids.begin(), all_ids.end(), 0);
  std::vector<CutPiece> pants = cut_along(mesh, cuffs, all_ids);
  if (static_cast<int>(pants.size()) != 2 * g - 2)
    throw DiameterError("pants_constant: cutting did not yield the pants");
  for (const CutPiece& p : pants)
    if (p.boundary_names.size() != 3)
      throw DiameterError("pants_constant: a piece is not a pair of pants");

  auto record = [&](const std::string& label, double value) {
    out.components.push_back({label, value});
    out.dprime = std::max(out.dprime, value);
  };

  // Extremal length of each boundary cuff inside its pants. The loop class
  // is tracked by its winding across a dual arc to another boundary
  // component (preferring a different cuff), the homology surrogate for
  // boundary-parallel homotopy in a planar piece.
  for (size_t pi = 0; pi < pants.size(); ++pi) {
    const CutPiece& piece = pants[pi];
    for (const std::string& bnd : piece.boundary_names) {
      std::string other;
      for (const std::string& cand : piece.boundary_names) {
        if (cand == bnd) continue;
        if (other.empty() ||
            cand.substr(0, cand.find('#')) != bnd.substr(0, bnd.find('#')))
          other = cand;
      }
      SurfaceMesh sub = piece.sub;  // cocycle is per-class state
      install_winding(sub, bnd, other);
      EdgePath loop = boundary_loop(sub, bnd);
      if (std::abs(path_winding(sub, loop)) != 1)
        throw DiameterError("pants_constant: cuff winding check failed");
      HomotopyClass cls;
      cls.loop = loop;
      SolveResult res = extremal_solve(sub, {cls}, opts);
      if (!res.converged)
        throw DiameterError("pants_constant: pants solve did not converge");
      record("Ext_P" + std::to_string(pi) + "(" + bnd + ")", res.ext);
    }
  }

  // Glued pieces: for each cuff k, cut along the others and take the piece
  // containing k. Arc families between boundary cuffs are routed through
  // the glue cuff (the corridor tag) as a pair of arc classes.
  for (size_t k = 0; k < cuffs.size(); ++k) {
    std::vector<int> ids;
    for (size_t c = 0; c < cuffs.size(); ++c)
      if (c != k) ids.push_back(static_cast<int>(c));
    std::vector<CutPiece> pieces = cut_along(mesh, cuffs, ids);
    std::string glue = "glue" + std::to_string(k);
    for (const CutPiece& piece : pieces) {
      if (!piece.sub.vertex_sets.count(glue)) continue;
      const auto& names = piece.boundary_names;
      for (size_t a = 0; a < names.size(); ++a)
        for (size_t b = a; b < names.size(); ++b) {
          HomotopyClass half1, half2;
          half1.is_arc = true;
          half1.from = names[a];
          half1.to = glue;
          half2.is_arc = true;
          half2.from = glue;
          half2.to = names[b];
          SolveResult res =
              extremal_solve(piece.sub, {half1, half2}, opts);
          if (!res.converged)
            throw DiameterError("pants_constant: arc solve did not converge");
          record("Ext_G" + std::to_string(k) + "(" + names[a] + "," +
                     names[b] + ")",
                 res.ext);
        }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// diameter_bound

DiameterBound diameter_bound(int genus, double dprime) {
  if (genus < 2) throw DiameterError("diameter_bound: genus must be >= 2");
  if (dprime < 0.0) throw DiameterError("diameter_bound: D' must be >= 0");
  DiameterBound b;
  double root = std::sqrt(dprime);
  b.pants_term = (2.0 * genus - 2.0) * 9.0 * root;
  b.cuff_term = (3.0 * genus - 3.0) * 4.0 * root;
  b.total = 30.0 * (genus - 1.0) * root;
  return b;
}

// ---------------------------------------------------------------------------
// singular example

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 60);
}

}  // namespace

double singular_radial_length(double eps) {
  if (!(eps > 0.0) || eps >= std::exp(-1.0))
    throw DiameterError("singular_radial_length: need 0 < eps < 1/e");
  // integral of dr / (r log(1/r)) = integral of du / u with u = log(1/r)
  double U = std::log(1.0 / eps);
  return integrate([](double u) { return 1.0 / u; }, 1.0, U, 1e-12);
}

SingularReport singular_example() {
  SingularReport rep;
  // Area: 2*pi * integral over r in (0, 1/e] of dr / (r log^2(1/r)),
  // i.e. 2*pi * integral over u in [1, inf) of du / u^2 after r = e^{-u};
  // truncating at U leaves exactly 1/U, which is appended as the tail.
  const double U = 1e8;
  double radial =
      integrate([](double u) { return 1.0 / (u * u); }, 1.0, U, 1e-12) +
      1.0 / U;
  rep.area = 2.0 * kPi * radial;
  // Boundary |z| = 1/e: rho = e on a circle of Euclidean length 2*pi/e.
  double rb = std::exp(-1.0);
  double rho_b = 1.0 / (rb * std::log(1.0 / rb));
  rep.boundary_length =
      integrate([&](double) { return rho_b * rb; }, 0.0, 2.0 * kPi, 1e-12);
  rep.boundary_stated = 2.0 * kPi * std::exp(1.0);
  rep.boundary_discrepancy =
      std::abs(rep.boundary_length - rep.boundary_stated) > 1e-6;
  for (int k = 1; k <= 4; ++k) {
    double eps = std::exp(-std::exp(static_cast<double>(k)));
    rep.radial.push_back({eps, singular_radial_length(eps)});
  }
  return rep;
}

}  // namespace extlen
