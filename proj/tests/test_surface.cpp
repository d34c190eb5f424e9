#include <random>
#include <sstream>

#include "doctest.h"
#include "extlen/surface.hpp"

using namespace extlen;

namespace {
std::mt19937 rng(777);

GroupWord random_word(int genus, int len) {
  std::uniform_int_distribution<int> d(1, 2 * genus);
  std::uniform_int_distribution<int> sgn(0, 1);
  GroupWord w;
  for (int i = 0; i < len; ++i) w.letters.push_back(sgn(rng) ? d(rng) : -d(rng));
  return w.freely_reduced();
}
}  // namespace

TEST_CASE("group word reduction") {
  GroupWord w({1, 2, -2, -1, 3});
  CHECK(w.freely_reduced().letters == std::vector<int>{3});
  GroupWord c({1, 2, 3, -2, -1});
  CHECK(c.cyclically_reduced().letters == std::vector<int>{3});
  // Idempotent.
  CHECK(c.cyclically_reduced().cyclically_reduced().letters ==
        c.cyclically_reduced().letters);
  CHECK(GroupWord({1, -1}).freely_reduced().empty());
  CHECK(GroupWord::parse("a1 B2 A1", 2).letters == std::vector<int>{1, -4, -1});
  CHECK(GroupWord::parse("a1 B2 A1", 2).str() == "a1 B2 A1");
}

TEST_CASE("genus 2 octagon closes up") {
  SurfacePresentation s = build_surface(2);
  REQUIRE(s.polygon.size() == 8);
  REQUIRE(s.generators.size() == 4);

  // Regular octagon with vertex angle pi/4: vertex radius arccosh(cot^2(pi/8)).
  double cot = 1.0 / std::tan(kPi / 8.0);
  CHECK(s.vertex_radius == doctest::Approx(std::acosh(cot * cot)).epsilon(1e-10));

  // Each generator maps its paired side onto its partner, pointwise.
  for (int i = 0; i < 8; ++i) {
    const auto& p = s.pairing[i];
    MobiusMap g = s.generator_map(p.generator);
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      DiskPoint on_side = geodesic_point(s.polygon[i], s.polygon[(i + 1) % 8], t);
      DiskPoint img = g.apply(on_side);
      DiskPoint expect = geodesic_point(s.polygon[p.partner], s.polygon[(p.partner + 1) % 8], 1.0 - t);
      CHECK(std::abs(img - expect) < 1e-8);
    }
  }

  // Relator evaluates to +-identity.
  MobiusMap rel = s.evaluate(s.relator());
  CHECK(rel.is_identity(1e-8));
}

TEST_CASE("higher genus closes up") {
  SurfacePresentation s = build_surface(3);
  CHECK(s.evaluate(s.relator()).is_identity(1e-8));
}

TEST_CASE("crossing letters move the polygon across each side") {
  SurfacePresentation s = build_surface(2);
  for (int i = 0; i < 8; ++i) {
    MobiusMap g = s.generator_map(s.crossing_letter(i));
    // The image of the origin must be outside the polygon, across side i:
    // side i's geodesic separates 0 from g(0).
    DiskPoint img = g.apply(Cx(0, 0));
    CHECK(s.sides[i].side(img) < 0.0);
    CHECK_FALSE(s.in_polygon(img));
    // And the image polygon shares side i: g maps the partner side onto side i.
    int p = s.pairing[i].partner;
    DiskPoint mid_partner = geodesic_point(s.polygon[p], s.polygon[(p + 1) % 8], 0.3);
    CHECK(std::abs(s.sides[i].side(g.apply(mid_partner))) < 1e-9);
  }
}

TEST_CASE("evaluate is a homomorphism") {
  SurfacePresentation s = build_surface(2);
  for (int i = 0; i < 50; ++i) {
    GroupWord u = random_word(2, 6), v = random_word(2, 6);
    MobiusMap lhs = s.evaluate(u * v);
    MobiusMap rhs = s.evaluate(u) * s.evaluate(v);
    DiskPoint z(0.1, 0.2);
    CHECK(std::abs(lhs.apply(z) - rhs.apply(z)) < 1e-9);
  }
}

TEST_CASE("normalize_point") {
  SurfacePresentation s = build_surface(2);

  DiskPoint inside(0.05, -0.03);
  auto [p0, w0] = s.normalize_point(inside);
  CHECK(w0.empty());
  CHECK(std::abs(p0 - inside) < 1e-15);

  // One-step inverse.
  MobiusMap a1 = s.generators[0];
  auto [p1, w1] = s.normalize_point(a1.apply(inside));
  CHECK(std::abs(p1 - inside) < 1e-9);
  CHECK(std::abs(s.evaluate(w1).apply(p1) - a1.apply(inside)) < 1e-9);

  // Random deck translates of interior points are recovered.
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int i = 0; i < 40; ++i) {
    DiskPoint z(u(rng), u(rng));
    if (!s.in_polygon(z)) continue;
    // Short words only: a length-8 translate sits ~24 apart hyperbolically,
    // where double precision cannot resolve 1e-8 in the disk.
    GroupWord w = random_word(2, 4);
    DiskPoint far = s.evaluate(w).apply(z);
    auto [q, wq] = s.normalize_point(far);
    CHECK(std::abs(q - z) < 1e-8);
    CHECK(std::abs(s.evaluate(wq).apply(q) - far) < 1e-8);
  }
}

TEST_CASE("geodesic length") {
  SurfacePresentation s = build_surface(2);
  double la = s.geodesic_length(GroupWord({1}));
  CHECK(la > 0.0);
  CHECK(s.geodesic_length(GroupWord({1, 1})) == doctest::Approx(2 * la).epsilon(1e-10));
  CHECK_THROWS_AS(s.geodesic_length(s.relator()), SurfaceError);
  CHECK_THROWS_AS(s.geodesic_length(GroupWord()), SurfaceError);

  // Conjugation invariance over random conjugators.
  GroupWord w({1, 2, -1});
  double base = s.geodesic_length(w);
  for (int i = 0; i < 100; ++i) {
    GroupWord c = random_word(2, 5);
    GroupWord conj = c * w * c.inverse();
    CHECK(s.geodesic_length(conj) == doctest::Approx(base).epsilon(1e-8));
  }

  // Cross-check against the trace directly.
  MobiusMap m = s.evaluate(GroupWord({1}));
  CHECK(la == doctest::Approx(2.0 * std::acosh(m.abs_trace() / 2.0)).epsilon(1e-12));
  // The translation length is a lower bound for displacement of 0.
  CHECK(hyp_distance(Cx(0, 0), m.apply(Cx(0, 0))) >= la - 1e-10);
}

TEST_CASE("surface save/load round trip") {
  SurfacePresentation s = build_surface(2);
  std::ostringstream os;
  save_surface(s, os);
  std::istringstream is(os.str());
  SurfacePresentation t = load_surface(is);
  std::ostringstream os2;
  save_surface(t, os2);
  CHECK(os.str() == os2.str());
  CHECK(t.genus == 2);
  CHECK(t.evaluate(t.relator()).is_identity(1e-8));
}

TEST_CASE("unsupported genus") {
  CHECK_THROWS_AS(build_surface(1), SurfaceError);
}
