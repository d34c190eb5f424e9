#include "extlen/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace extlen {

namespace {

// Union-find over raw nodes carrying deck words: point(i) == E(w[i]) point(root(i)).
struct UnionFindWords {
  std::vector<int> parent;
  std::vector<GroupWord> word;

  explicit UnionFindWords(int n) : parent(n), word(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }

  std::pair<int, GroupWord> find(int i) {
    if (parent[i] == i) return {i, GroupWord{}};
    auto [root, wr] = find(parent[i]);
    word[i] = (word[i] * wr).freely_reduced();
    parent[i] = root;
    return {root, word[i]};
  }

  // Identify point(q) == E({letter}) point(p).
  void unite(int p, int q, int letter) {
    auto [rp, wp] = find(p);
    auto [rq, wq] = find(q);
    if (rp == rq) return;  // consistency of cycles is checked downstream
    parent[rq] = rp;
    word[rq] = (wq.inverse() * GroupWord{{letter}} * wp).freely_reduced();
  }
};

double triangle_area(const DiskPoint& a, const DiskPoint& b,
                     const DiskPoint& c) {
  auto corner = [](const DiskPoint& p, const DiskPoint& q, const DiskPoint& r) {
    double ang = geodesic_direction(p, q) - geodesic_direction(p, r);
    ang = wrap_angle(ang);
    if (ang > kPi) ang = 2.0 * kPi - ang;
    return ang;
  };
  return kPi - corner(a, b, c) - corner(b, c, a) - corner(c, a, b);
}

}  // namespace

void SurfaceMesh::build_adjacency() {
  adj.assign(vpos.size(), {});
  for (size_t e = 0; e < edges.size(); ++e) {
    adj[edges[e].u].push_back({static_cast<int>(e), +1});
    adj[edges[e].v].push_back({static_cast<int>(e), -1});
  }
}

int SurfaceMesh::edge_between(int u, int v) const {
  for (auto [e, dir] : adj[u]) {
    int other = dir > 0 ? edges[e].v : edges[e].u;
    if (other == v) return e;
  }
  return -1;
}

GroupWord SurfaceMesh::edge_word(int e, int dir) const {
  return dir > 0 ? edges[e].cocycle : edges[e].cocycle.inverse();
}

double SurfaceMesh::total_face_area() const {
  double s = 0.0;
  for (double a : face_area) s += a;
  return s;
}

SurfaceMesh build_mesh(const SurfacePresentation& s, double h) {
  if (h < 0.01 || h > 1.0) throw MeshError("build_mesh: h out of range [0.01, 1]");
  const int n = 4 * s.genus;
  // Each wedge triangle (0, corner_i, corner_{i+1}) is subdivided into N^2
  // geodesic triangles: row sr (fraction sr/N from the center) carries sr+1
  // nodes at equal fractions along the row geodesic. Rows conform to the thin
  // corner angles, which keeps every edge below h (plain fan quads develop
  // diagonals near 2h at the polygon corners).
  const int N =
      static_cast<int>(std::ceil(std::max(s.vertex_radius, s.side_length) / h));
  const int nb = N;  // boundary row node count per side

  // Raw node keys: {0,0,0} center; {1,i,sr} on the ray to corner i,
  // sr in 1..N; {2, i, sr*(N+1)+u} interior of row sr in wedge i, 1<=u<=sr-1.
  std::map<std::array<int, 3>, int> ids;
  std::vector<DiskPoint> pos;
  auto key_of = [&](int i, int sr, int u) -> std::array<int, 3> {
    if (sr == 0) return {0, 0, 0};
    if (u == 0) return {1, i, sr};
    if (u == sr) return {1, (i + 1) % n, sr};
    return {2, i, sr * (N + 1) + u};
  };
  auto node = [&](int i, int sr, int u) -> int {
    auto key = key_of(i, sr, u);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    DiskPoint p;
    if (key[0] == 0) {
      p = DiskPoint(0.0, 0.0);
    } else if (key[0] == 1) {
      p = geodesic_point(DiskPoint(0, 0), s.polygon[key[1]],
                         static_cast<double>(key[2]) / N);
    } else {
      int sr2 = key[2] / (N + 1), uu = key[2] % (N + 1);
      double f = static_cast<double>(sr2) / N;
      DiskPoint a = geodesic_point(DiskPoint(0, 0), s.polygon[i], f);
      DiskPoint b = geodesic_point(DiskPoint(0, 0), s.polygon[(i + 1) % n], f);
      p = geodesic_point(a, b, static_cast<double>(uu) / sr2);
    }
    int id = static_cast<int>(pos.size());
    ids.emplace(key, id);
    pos.push_back(p);
    return id;
  };

  std::vector<std::array<int, 3>> raw_faces;
  for (int i = 0; i < n; ++i)
    for (int sr = 0; sr < N; ++sr)
      for (int u = 0; u <= sr; ++u) {
        raw_faces.push_back(
            {node(i, sr, u), node(i, sr + 1, u), node(i, sr + 1, u + 1)});
        if (u < sr)
          raw_faces.push_back(
              {node(i, sr, u), node(i, sr + 1, u + 1), node(i, sr, u + 1)});
      }

  const int nraw = static_cast<int>(pos.size());

  // Identify paired boundary rows.
  UnionFindWords uf(nraw);
  for (int i = 0; i < n; ++i) {
    int j = s.pairing[i].partner;
    if (j < i) continue;
    const MobiusMap m = s.generator_map(s.pairing[i].generator);
    for (int u = 0; u <= nb; ++u) {
      int p = node(i, N, u);
      DiskPoint img = m.apply(pos[p]);
      int q1 = node(j, N, nb - u), q2 = node(j, N, u);
      int q = std::abs(img - pos[q1]) <= std::abs(img - pos[q2]) ? q1 : q2;
      if (std::abs(img - pos[q]) > 1e-8)
        throw MeshError("build_mesh: side pairing does not match boundary nodes");
      uf.unite(p, q, s.pairing[i].generator);
    }
  }

  // Quotient vertices and per-raw-node lift words.
  std::vector<int> qid(nraw, -1);
  std::vector<GroupWord> lift(nraw);
  SurfaceMesh mesh;
  mesh.rank = 2 * s.genus;
  mesh.h = h;
  mesh.surf = std::make_shared<SurfacePresentation>(s);
  for (int r = 0; r < nraw; ++r) {
    auto [root, w] = uf.find(r);
    if (qid[root] < 0) {
      qid[root] = static_cast<int>(mesh.vpos.size());
      mesh.vpos.push_back(pos[root]);
    }
    qid[r] = qid[root];
    lift[r] = w;
  }

  // Quotient edges with cocycles; duplicate realizations must agree.
  std::map<std::pair<int, int>, int> edge_ids;
  auto add_edge = [&](int p, int q) -> int {
    int qu = qid[p], qv = qid[q];
    if (qu == qv) throw MeshError("build_mesh: degenerate self-loop edge");
    GroupWord coc = (lift[p].inverse() * lift[q]).freely_reduced();
    bool flip = qu > qv;
    if (flip) {
      std::swap(qu, qv);
      coc = coc.inverse();
    }
    auto it = edge_ids.find({qu, qv});
    if (it != edge_ids.end()) {
      const MobiusMap diff = s.evaluate(coc) *
                             s.evaluate(mesh.edges[it->second].cocycle).inverse();
      if (!diff.is_identity(1e-8))
        throw MeshError("build_mesh: inconsistent cocycle on a shared edge");
      return it->second;
    }
    MeshEdge e;
    e.u = qu;
    e.v = qv;
    e.len = hyp_distance(pos[p], pos[q]);
    e.weight = 0.0;
    e.cocycle = coc;
    int id = static_cast<int>(mesh.edges.size());
    edge_ids.emplace(std::make_pair(qu, qv), id);
    mesh.edges.push_back(std::move(e));
    return id;
  };

  mesh.faces.reserve(raw_faces.size());
  mesh.face_area.reserve(raw_faces.size());
  for (const auto& f : raw_faces) {
    double area = triangle_area(pos[f[0]], pos[f[1]], pos[f[2]]);
    if (!(area > 0.0)) throw MeshError("build_mesh: non-positive face area");
    mesh.faces.push_back({qid[f[0]], qid[f[1]], qid[f[2]]});
    mesh.face_area.push_back(area);
    for (int k = 0; k < 3; ++k) {
      int e = add_edge(f[k], f[(k + 1) % 3]);
      mesh.edges[e].weight += area / 3.0;
    }
  }

  double wl2 = 0.0;
  for (auto& e : mesh.edges) {
    e.weight /= e.len * e.len;
    wl2 += e.weight * e.len * e.len;
  }
  const double rescale = s.area() / wl2;
  for (auto& e : mesh.edges) e.weight *= rescale;

  if (mesh.euler_characteristic() != s.euler_characteristic())
    throw MeshError("build_mesh: Euler characteristic mismatch");
  if (std::abs(mesh.total_face_area() - s.area()) > 0.01 * s.area())
    throw MeshError("build_mesh: face areas do not sum to the surface area");
  for (const auto& e : mesh.edges)
    if (e.len > 1.5 * h) throw MeshError("build_mesh: edge longer than 1.5 h");

  mesh.build_adjacency();
  return mesh;
}

SurfaceMesh make_grid_fixture(int k) {
  if (k < 1) throw MeshError("make_grid_fixture: k must be positive");
  SurfaceMesh mesh;
  mesh.rank = 0;
  mesh.h = 1.0;
  auto id = [&](int i, int j) { return j * (k + 1) + i; };
  for (int j = 0; j <= k; ++j)
    for (int i = 0; i <= k; ++i) {
      if (j == 0 && i == 0) mesh.vpos.resize((k + 1) * (k + 1));
      mesh.vpos[id(i, j)] = DiskPoint(i, j);
    }
  for (int j = 0; j <= k; ++j)
    for (int i = 0; i <= k; ++i) {
      if (i < k) mesh.edges.push_back({id(i, j), id(i + 1, j), 1.0, 1.0, {}});
      if (j < k) mesh.edges.push_back({id(i, j), id(i, j + 1), 1.0, 1.0, {}});
    }
  for (int j = 0; j <= k; ++j) {
    mesh.vertex_sets["left"].push_back(id(0, j));
    mesh.vertex_sets["right"].push_back(id(k, j));
  }
  mesh.build_adjacency();
  return mesh;
}

SurfaceMesh make_cylinder_fixture(int m) {
  if (m < 1) throw MeshError("make_cylinder_fixture: m must be positive");
  const int nx = 3 * m, ny = m;
  const double d = 1.0 / m;
  SurfaceMesh mesh;
  mesh.rank = 1;
  mesh.h = d;
  auto id = [&](int i, int j) { return j * nx + i; };
  mesh.vpos.resize(static_cast<size_t>(ny + 1) * nx);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i) mesh.vpos[id(i, j)] = DiskPoint(i * d, j * d);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i) {
      GroupWord coc = i == nx - 1 ? GroupWord{{1}} : GroupWord{};
      mesh.edges.push_back({id(i, j), id((i + 1) % nx, j), d, 1.0, coc});
      if (j < ny) mesh.edges.push_back({id(i, j), id(i, j + 1), d, 1.0, {}});
    }
  for (int i = 0; i < nx; ++i) {
    mesh.vertex_sets["bottom"].push_back(id(i, 0));
    mesh.vertex_sets["top"].push_back(id(i, ny));
  }
  mesh.build_adjacency();
  return mesh;
}

void save_mesh(const SurfaceMesh& mesh, std::ostream& os) {
  char buf[256];
  os << "extlen-mesh 1\n";
  os << "rank " << mesh.rank << "\n";
  std::snprintf(buf, sizeof buf, "h %.16e\n", mesh.h);
  os << buf;
  os << "surface " << (mesh.surf ? 1 : 0) << "\n";
  if (mesh.surf) save_surface(*mesh.surf, os);
  os << "vertices " << mesh.vpos.size() << "\n";
  for (const auto& p : mesh.vpos) {
    std::snprintf(buf, sizeof buf, "%.16e %.16e\n", p.real(), p.imag());
    os << buf;
  }
  os << "edges " << mesh.edges.size() << "\n";
  for (const auto& e : mesh.edges) {
    std::snprintf(buf, sizeof buf, "%d %d %.16e %.16e %zu", e.u, e.v, e.len,
                  e.weight, e.cocycle.size());
    os << buf;
    for (int l : e.cocycle.letters) os << " " << l;
    os << "\n";
  }
  os << "faces " << mesh.faces.size() << "\n";
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    std::snprintf(buf, sizeof buf, "%d %d %d %.16e\n", mesh.faces[f][0],
                  mesh.faces[f][1], mesh.faces[f][2], mesh.face_area[f]);
    os << buf;
  }
  os << "sets " << mesh.vertex_sets.size() << "\n";
  for (const auto& [name, ids] : mesh.vertex_sets) {
    os << name << " " << ids.size();
    for (int v : ids) os << " " << v;
    os << "\n";
  }
}

SurfaceMesh load_mesh(std::istream& is) {
  std::string header;
  std::getline(is, header);
  if (header != "extlen-mesh 1")
    throw MeshError("load_mesh: unrecognized header");
  SurfaceMesh mesh;
  std::string key;
  int flag = 0;
  size_t nv = 0, ne = 0, nf = 0, nsets = 0;
  if (!(is >> key >> mesh.rank) || key != "rank")
    throw MeshError("load_mesh: expected rank");
  if (!(is >> key >> mesh.h) || key != "h")
    throw MeshError("load_mesh: expected h");
  if (!(is >> key >> flag) || key != "surface")
    throw MeshError("load_mesh: expected surface flag");
  if (flag) {
    std::getline(is, key);  // consume end of line before the surface block
    mesh.surf = std::make_shared<SurfacePresentation>(load_surface(is));
  }
  if (!(is >> key >> nv) || key != "vertices")
    throw MeshError("load_mesh: expected vertices");
  mesh.vpos.resize(nv);
  for (auto& p : mesh.vpos) {
    double x, y;
    if (!(is >> x >> y)) throw MeshError("load_mesh: bad vertex");
    p = DiskPoint(x, y);
  }
  if (!(is >> key >> ne) || key != "edges")
    throw MeshError("load_mesh: expected edges");
  mesh.edges.resize(ne);
  for (auto& e : mesh.edges) {
    size_t wl = 0;
    if (!(is >> e.u >> e.v >> e.len >> e.weight >> wl))
      throw MeshError("load_mesh: bad edge");
    e.cocycle.letters.resize(wl);
    for (auto& l : e.cocycle.letters)
      if (!(is >> l)) throw MeshError("load_mesh: bad cocycle letter");
  }
  if (!(is >> key >> nf) || key != "faces")
    throw MeshError("load_mesh: expected faces");
  mesh.faces.resize(nf);
  mesh.face_area.resize(nf);
  for (size_t f = 0; f < nf; ++f)
    if (!(is >> mesh.faces[f][0] >> mesh.faces[f][1] >> mesh.faces[f][2] >>
          mesh.face_area[f]))
      throw MeshError("load_mesh: bad face");
  if (!(is >> key >> nsets) || key != "sets")
    throw MeshError("load_mesh: expected sets");
  for (size_t k = 0; k < nsets; ++k) {
    std::string name;
    size_t count = 0;
    if (!(is >> name >> count)) throw MeshError("load_mesh: bad set");
    auto& ids = mesh.vertex_sets[name];
    ids.resize(count);
    for (auto& v : ids)
      if (!(is >> v)) throw MeshError("load_mesh: bad set entry");
  }
  mesh.build_adjacency();
  return mesh;
}

}  // namespace extlen
