#include "extlen/surface.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace extlen {

GroupWord GroupWord::inverse() const {
  GroupWord out;
  out.letters.reserve(letters.size());
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) out.letters.push_back(-*it);
  return out;
}

GroupWord GroupWord::operator*(const GroupWord& other) const {
  GroupWord out = *this;
  out.letters.insert(out.letters.end(), other.letters.begin(), other.letters.end());
  return out;
}

GroupWord GroupWord::freely_reduced() const {
  GroupWord out;
  for (int l : letters) {
    if (!out.letters.empty() && out.letters.back() == -l)
      out.letters.pop_back();
    else
      out.letters.push_back(l);
  }
  return out;
}

GroupWord GroupWord::cyclically_reduced() const {
  GroupWord w = freely_reduced();
  size_t i = 0, j = w.letters.size();
  while (j > i + 1 && w.letters[i] == -w.letters[j - 1]) {
    ++i;
    --j;
  }
  return GroupWord(std::vector<int>(w.letters.begin() + i, w.letters.begin() + j));
}

std::string GroupWord::str() const {
  std::string s;
  for (int l : letters) {
    if (!s.empty()) s += ' ';
    int idx = std::abs(l) - 1;
    char base = (idx % 2 == 0) ? 'a' : 'b';
    if (l < 0) base = char(std::toupper(base));
    s += base;
    s += std::to_string(idx / 2 + 1);
  }
  return s;
}

GroupWord GroupWord::parse(const std::string& s, int genus) {
  GroupWord w;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) {
    if (tok.size() < 2) throw SurfaceError("bad word token: " + tok);
    char c = tok[0];
    int handle = std::stoi(tok.substr(1)) - 1;
    if (handle < 0 || handle >= genus) throw SurfaceError("bad word token: " + tok);
    int letter = 0;
    if (c == 'a') letter = 2 * handle + 1;
    else if (c == 'b') letter = 2 * handle + 2;
    else if (c == 'A') letter = -(2 * handle + 1);
    else if (c == 'B') letter = -(2 * handle + 2);
    else throw SurfaceError("bad word token: " + tok);
    w.letters.push_back(letter);
  }
  return w;
}

MobiusMap SurfacePresentation::generator_map(int letter) const {
  int idx = std::abs(letter) - 1;
  if (idx < 0 || idx >= int(generators.size()))
    throw SurfaceError("generator letter out of range");
  return letter > 0 ? generators[idx] : generators[idx].inverse();
}

MobiusMap SurfacePresentation::evaluate(const GroupWord& w) const {
  MobiusMap m;
  for (int l : w.letters) m = m * generator_map(l);
  return m;
}

int SurfacePresentation::crossing_letter(int side) const {
  return pairing[pairing[side].partner].generator;
}

bool SurfacePresentation::in_polygon(const DiskPoint& z, double tol) const {
  for (const auto& g : sides)
    if (g.side(z) < -tol) return false;
  return true;
}

std::pair<DiskPoint, GroupWord> SurfacePresentation::normalize_point(const DiskPoint& z) const {
  DiskPoint p = z;
  GroupWord word;
  const size_t kMaxLen = 1000000;
  while (!in_polygon(p)) {
    double best = hyp_distance(p, Cx(0, 0)) - 1e-13;
    int best_side = -1;
    DiskPoint best_p;
    for (size_t i = 0; i < sides.size(); ++i) {
      MobiusMap g = generator_map(crossing_letter(int(i))).inverse();
      DiskPoint q = g.apply(p);
      double d = hyp_distance(q, Cx(0, 0));
      if (d < best) {
        best = d;
        best_side = int(i);
        best_p = q;
      }
    }
    if (best_side < 0) {
      if (in_polygon(p, 1e-9)) break;  // on the boundary within noise
      throw SurfaceError("normalize_point: no distance-decreasing pairing found");
    }
    p = best_p;
    word.letters.push_back(crossing_letter(best_side));
    if (word.letters.size() > kMaxLen)
      throw SurfaceError("normalize_point: reduction failed to terminate");
  }
  return {p, word};
}

double SurfacePresentation::geodesic_length(const GroupWord& w) const {
  GroupWord r = w.cyclically_reduced();
  if (r.empty()) throw SurfaceError("geodesic_length: trivial free homotopy class");
  MobiusMap m = evaluate(r);
  if (m.is_identity(1e-6))
    throw SurfaceError("geodesic_length: trivial free homotopy class");
  double len;
  try {
    len = translation_length(m);
  } catch (const HypError&) {
    throw SurfaceError("geodesic_length: non-hyperbolic evaluation (geometry corrupt)");
  }
  // Anything far below the systole is a trivial class seen through roundoff.
  if (len < 1e-3) throw SurfaceError("geodesic_length: trivial free homotopy class");
  return len;
}

GroupWord SurfacePresentation::relator() const {
  GroupWord w;
  for (int j = 0; j < genus; ++j) {
    w.letters.push_back(2 * j + 1);
    w.letters.push_back(2 * j + 2);
    w.letters.push_back(-(2 * j + 1));
    w.letters.push_back(-(2 * j + 2));
  }
  return w;
}

namespace {

std::vector<DiskPoint> regular_vertices(int n, double euclid_radius) {
  std::vector<DiskPoint> v(n);
  for (int k = 0; k < n; ++k)
    v[k] = std::polar(euclid_radius, 2.0 * kPi * k / n);
  return v;
}

// Interior angle of the regular n-gon with the given Euclidean vertex radius,
// measured from the actual geodesic arcs at vertex 0.
double interior_angle(int n, double euclid_radius) {
  auto v = regular_vertices(n, euclid_radius);
  double d_prev = geodesic_direction(v[0], v[n - 1]);
  double d_next = geodesic_direction(v[0], v[1]);
  double diff = wrap_angle(d_prev - d_next);
  if (diff > kPi) diff = 2.0 * kPi - diff;
  return diff;
}

}  // namespace

SurfacePresentation build_surface(int genus) {
  if (genus < 2) throw SurfaceError("build_surface: genus must be >= 2");
  const int n = 4 * genus;

  // Vertex radius by bisection: angle sum must close up to 2*pi.
  double lo = 0.05, hi = 0.999999;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (n * interior_angle(n, mid) > 2.0 * kPi)
      lo = mid;
    else
      hi = mid;
  }
  double r_e = 0.5 * (lo + hi);

  SurfacePresentation s;
  s.genus = genus;
  s.polygon = regular_vertices(n, r_e);
  s.vertex_radius = hyp_distance(Cx(0, 0), s.polygon[0]);
  s.side_length = hyp_distance(s.polygon[0], s.polygon[1]);

  s.sides.resize(n);
  for (int i = 0; i < n; ++i)
    s.sides[i] = geodesic_through(s.polygon[i], s.polygon[(i + 1) % n]);
  {
    DiskPoint mid = geodesic_point(s.polygon[0], s.polygon[1], 0.5);
    s.inradius = hyp_distance(Cx(0, 0), mid);
  }

  // Side labels around the boundary: a_j b_j a_j^-1 b_j^-1 on sides
  // 4j..4j+3. Generator a_j maps side 4j+2 reversed onto side 4j.
  s.generators.resize(2 * genus);
  s.pairing.assign(n, SidePairing{});
  auto vtx = [&s, n](int i) { return s.polygon[((i % n) + n) % n]; };
  // The b_j direction is flipped relative to a_j so that the product of
  // commutators prod [a_j, b_j] is the defining relation.
  for (int j = 0; j < genus; ++j) {
    int a = 4 * j, b = 4 * j + 1;
    s.generators[2 * j] = MobiusMap::two_point_map(vtx(a + 2), vtx(a + 3), vtx(a + 1), vtx(a));
    s.generators[2 * j + 1] =
        MobiusMap::two_point_map(vtx(b + 2), vtx(b + 3), vtx(b + 1), vtx(b)).inverse();
    // generator field: the signed letter mapping side i onto its partner.
    s.pairing[a] = {a + 2, -(2 * j + 1)};
    s.pairing[a + 2] = {a, 2 * j + 1};
    s.pairing[b] = {b + 2, 2 * j + 2};
    s.pairing[b + 2] = {b, -(2 * j + 2)};
  }
  return s;
}

void save_surface(const SurfacePresentation& s, std::ostream& os) {
  char buf[512];
  os << "extlen-surface 1\n";
  os << "genus " << s.genus << "\n";
  for (size_t k = 0; k < s.generators.size(); ++k) {
    const MobiusMap& m = s.generators[k];
    std::snprintf(buf, sizeof buf, "generator %zu %.16e %.16e %.16e %.16e\n", k,
                  m.a.real(), m.a.imag(), m.b.real(), m.b.imag());
    os << buf;
  }
  for (size_t k = 0; k < s.polygon.size(); ++k) {
    std::snprintf(buf, sizeof buf, "vertex %zu %.16e %.16e\n", k,
                  s.polygon[k].real(), s.polygon[k].imag());
    os << buf;
  }
  for (size_t k = 0; k < s.pairing.size(); ++k)
    os << "pairing " << k << " " << s.pairing[k].partner << " "
       << s.pairing[k].generator << "\n";
}

SurfacePresentation load_surface(std::istream& is) {
  std::string header;
  std::getline(is, header);
  if (header != "extlen-surface 1")
    throw SurfaceError("load_surface: unrecognized header");
  SurfacePresentation s;
  std::string key;
  if (!(is >> key >> s.genus) || key != "genus")
    throw SurfaceError("load_surface: expected genus line");
  const int n = 4 * s.genus;
  s.generators.resize(2 * s.genus);
  s.polygon.resize(n);
  s.pairing.resize(n);
  size_t idx;
  for (int k = 0; k < 2 * s.genus; ++k) {
    double ar, ai, br, bi;
    if (!(is >> key >> idx >> ar >> ai >> br >> bi) || key != "generator")
      throw SurfaceError("load_surface: bad generator line");
    s.generators[idx] = MobiusMap{Cx(ar, ai), Cx(br, bi), 0.0};
  }
  for (int k = 0; k < n; ++k) {
    double x, y;
    if (!(is >> key >> idx >> x >> y) || key != "vertex")
      throw SurfaceError("load_surface: bad vertex line");
    s.polygon[idx] = Cx(x, y);
  }
  for (int k = 0; k < n; ++k) {
    int partner, gen;
    if (!(is >> key >> idx >> partner >> gen) || key != "pairing")
      throw SurfaceError("load_surface: bad pairing line");
    s.pairing[idx] = {partner, gen};
  }
  s.sides.resize(n);
  for (int i = 0; i < n; ++i)
    s.sides[i] = geodesic_through(s.polygon[i], s.polygon[(i + 1) % n]);
  s.vertex_radius = hyp_distance(Cx(0, 0), s.polygon[0]);
  s.side_length = hyp_distance(s.polygon[0], s.polygon[1]);
  s.inradius = hyp_distance(Cx(0, 0), geodesic_point(s.polygon[0], s.polygon[1], 0.5));
  return s;
}

}  // namespace extlen
