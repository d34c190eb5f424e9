#pragma once

// Closed genus-g surfaces presented by a regular hyperbolic 4g-gon with the
// standard side pairing a1 b1 a1^-1 b1^-1 ... ag bg ag^-1 bg^-1, plus group
// words and fundamental-domain reduction.

#include <iosfwd>
#include <string>
#include <vector>

#include "extlen/hyp.hpp"

namespace extlen {

// Letters are signed generator indices: +k / -k for generator k-1 and its
// inverse, k in 1..2g. Generator order: a1, b1, a2, b2, ...
struct GroupWord {
  std::vector<int> letters;

  GroupWord() = default;
  explicit GroupWord(std::vector<int> l) : letters(std::move(l)) {}

  bool empty() const { return letters.empty(); }
  size_t size() const { return letters.size(); }
  GroupWord inverse() const;
  GroupWord operator*(const GroupWord& other) const;
  // Cancel adjacent x x^-1 pairs.
  GroupWord freely_reduced() const;
  // Freely reduce, then cancel across the wrap-around.
  GroupWord cyclically_reduced() const;
  std::string str() const;  // e.g. "a1 b1 A1" (capital = inverse)
  static GroupWord parse(const std::string& s, int genus);
};

struct SidePairing {
  int partner;      // paired side index
  int generator;    // signed letter of the pairing map (maps this side onto partner)
};

struct SurfacePresentation {
  int genus = 0;
  // 2g generator maps; generators[k] realizes letter k+1.
  std::vector<MobiusMap> generators;
  std::vector<DiskPoint> polygon;  // 4g vertices, counterclockwise
  std::vector<SidePairing> pairing;  // per side i (from vertex i to i+1)
  std::vector<Geodesic> sides;       // complete geodesics carrying each side
  double vertex_radius = 0.0;        // hyperbolic distance 0 -> vertex
  double side_length = 0.0;          // hyperbolic length of each side
  double inradius = 0.0;

  MobiusMap evaluate(const GroupWord& w) const;
  MobiusMap generator_map(int letter) const;  // signed letter
  double area() const { return 2.0 * kPi * std::abs(euler_characteristic()); }
  int euler_characteristic() const { return 2 - 2 * genus; }

  // Deck element crossing side i outward: maps the fundamental polygon to its
  // neighbor across side i. Returned as a signed letter.
  int crossing_letter(int side) const;

  bool in_polygon(const DiskPoint& z, double tol = 1e-12) const;
  // Translate z into the closed fundamental polygon. Returns the reduced
  // point and a word w with evaluate(w).apply(point) == z.
  std::pair<DiskPoint, GroupWord> normalize_point(const DiskPoint& z) const;

  // Hyperbolic length of the closed geodesic in the free homotopy class of w.
  double geodesic_length(const GroupWord& w) const;

  // The defining relator prod [a_i, b_i].
  GroupWord relator() const;
};

struct SurfaceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SurfacePresentation build_surface(int genus);

void save_surface(const SurfacePresentation& s, std::ostream& os);
SurfacePresentation load_surface(std::istream& is);

}  // namespace extlen
