#include "extlen/flow.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace extlen {
namespace {

struct VertexHit {};

// Orientation map of the carrying geodesic: pushes it onto the real diameter
// so that arclength along the flow direction is axis_coordinate.
struct ArcFrame {
  MobiusMap to_diameter;
  MobiusMap from_diameter;
  Cx forward;  // ideal endpoint ahead of the flow
  double t0;   // coordinate of the segment start

  ArcFrame(const DiskPoint& z, double angle) {
    auto [back, fwd] = geodesic_endpoints(z, angle);
    forward = fwd;
    to_diameter = axis_to_diameter(back, fwd);
    from_diameter = to_diameter.inverse();
    t0 = axis_coordinate(to_diameter.apply(z));
  }

  double coord(const DiskPoint& p) const {
    return axis_coordinate(to_diameter.apply(p));
  }
  DiskPoint at(double t) const {
    return from_diameter.apply(Cx(std::tanh(t / 2.0), 0.0));
  }
};

FlowTrajectory flow_attempt(const SurfacePresentation& s, const UnitTangent& v,
                            double T) {
  FlowTrajectory tr;
  tr.start = v;
  tr.time = T;
  tr.end = v;
  if (T <= 0.0) return tr;

  UnitTangent cur = v;
  double remaining = T;
  int n = static_cast<int>(s.polygon.size());
  int entry_side = -1;  // side the current point lies on, excluded as an exit
  int tiny_steps = 0;   // consecutive near-zero advances (vertex passage)
  while (true) {
    Geodesic g = geodesic_from(cur.base, cur.angle);
    ArcFrame frame(cur.base, cur.angle);

    double best = std::numeric_limits<double>::infinity();
    int exit_side = -1;
    DiskPoint exit_point;
    for (int k = 0; k < n; ++k) {
      if (k == entry_side) continue;
      for (const Cx& p : geodesic_intersections(g, s.sides[k])) {
        if (!in_open_disk(p)) continue;  // circle pairs also meet outside the disk
        double dt = frame.coord(p) - frame.t0;
        // Near a vertex the true exit can sit a hair behind the entry point.
        if (dt > -1e-9 && dt < best) {
          best = dt;
          exit_side = k;
          exit_point = p;
        }
      }
    }
    // No candidate ahead happens when the trajectory threads a polygon
    // corner so closely that every crossing sits behind the tolerance;
    // treat it like a vertex passage and let the caller rotate.
    if (exit_side < 0) throw VertexHit{};
    double advance = std::max(best, 0.0);

    if (remaining <= advance) {
      DiskPoint pe = frame.at(frame.t0 + remaining);
      tr.segments.push_back({cur.base, cur.angle, remaining, -1});
      tr.end = {pe, boundary_direction(pe, frame.forward)};
      return tr;
    }

    for (const DiskPoint& vv : s.polygon)
      if (std::abs(exit_point - vv) < 1e-12) throw VertexHit{};
    tiny_steps = advance < 1e-9 ? tiny_steps + 1 : 0;
    if (tiny_steps > 10) throw VertexHit{};

    tr.segments.push_back({cur.base, cur.angle, advance, exit_side});
    int letter = s.crossing_letter(exit_side);
    tr.deck_word.letters.push_back(letter);
    UnitTangent out{exit_point, boundary_direction(exit_point, frame.forward)};
    cur = s.generator_map(-letter).apply(out);
    entry_side = s.pairing[exit_side].partner;
    remaining -= advance;
  }
}

}  // namespace

UnitTangent segment_point(const FlowSegment& seg, double t) {
  ArcFrame frame(seg.start, seg.angle);
  DiskPoint p = frame.at(frame.t0 + t);
  return {p, boundary_direction(p, frame.forward)};
}

FlowTrajectory flow(const SurfacePresentation& s, const UnitTangent& v, double T) {
  if (!s.in_polygon(v.base, 1e-9))
    throw FlowError("flow: start point outside the fundamental polygon");
  UnitTangent start = v;
  for (int attempt = 0;; ++attempt) {
    try {
      return flow_attempt(s, start, T);
    } catch (const VertexHit&) {
      // Geometric rotation steps: an axis threading a corner exactly (the
      // commutator classes do) needs a bigger kick than a generic orbit.
      if (attempt >= 8) throw FlowError("flow: persistent vertex hit");
      start.angle = wrap_angle(start.angle + 1e-9 * std::pow(4.0, attempt));
    }
  }
}

WeightedMultiCurve close_trajectory(const SurfacePresentation&,
                                    const FlowTrajectory& traj) {
  GroupWord w = traj.deck_word.cyclically_reduced();
  if (w.empty())
    throw FlowError("close_trajectory: trivial deck word (trajectory too short)");
  return {{{w, 1.0}}};
}

WeightedMultiCurve liouville_approximant(const SurfacePresentation& s,
                                         const WeightedMultiCurve& g) {
  if (g.components.size() != 1 || g.components[0].weight != 1.0)
    throw FlowError("liouville_approximant: expects a single weight-1 component");
  double len = s.geodesic_length(g.components[0].word);
  double target = kPi * s.area() / 2.0;
  return {{{g.components[0].word, target / len}}};
}

UnitTangent sample_tangent(const SurfacePresentation& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double r = std::abs(s.polygon[0]);
  double dmax = hyperbolic_density(Cx(r, 0.0));
  std::uniform_real_distribution<double> ux(-r, r), u01(0.0, 1.0),
      uang(0.0, 2.0 * kPi);
  while (true) {
    DiskPoint z(ux(rng), ux(rng));
    if (std::abs(z) >= r || !s.in_polygon(z)) continue;
    double ratio = hyperbolic_density(z) / dmax;
    if (u01(rng) <= ratio * ratio) return {z, uang(rng)};
  }
}

void save_curve(const WeightedMultiCurve& c, std::ostream& os) {
  os << "extlen-curve 1\n" << c.components.size() << "\n";
  for (const auto& comp : c.components) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", comp.weight);
    os << buf << ": " << comp.word.str() << "\n";
  }
}

WeightedMultiCurve load_curve(std::istream& is, int genus) {
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != "extlen-curve" || version != 1)
    throw FlowError("load_curve: bad header");
  size_t count = 0;
  is >> count;
  is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
  WeightedMultiCurve c;
  for (size_t i = 0; i < count; ++i) {
    std::string line;
    if (!std::getline(is, line)) throw FlowError("load_curve: truncated");
    auto colon = line.find(':');
    if (colon == std::string::npos) throw FlowError("load_curve: missing weight");
    double w = std::stod(line.substr(0, colon));
    GroupWord word = GroupWord::parse(line.substr(colon + 1), genus);
    if (w <= 0.0) throw FlowError("load_curve: nonpositive weight");
    if (word.cyclically_reduced().empty())
      throw FlowError("load_curve: trivial component");
    c.components.push_back({word, w});
  }
  return c;
}

}  // namespace extlen
