#pragma once

// Event-driven geodesic flow on a closed surface: trajectories as chains of
// fundamental-domain arcs, closing into weighted multi-curves, and the
// normalized approximants built from them.

#include <cstdint>

#include "extlen/surface.hpp"

namespace extlen {

// One maximal arc inside the fundamental polygon. The carrying geodesic is
// geodesic_from(start, angle); the arc covers hyperbolic arclength [0, length].
struct FlowSegment {
  DiskPoint start{0.0, 0.0};
  double angle = 0.0;
  double length = 0.0;
  int exit_side = -1;  // polygon side crossed at the far end, -1 on the last segment
};

// Tangent at arclength t along a segment (t in [0, length]).
UnitTangent segment_point(const FlowSegment& seg, double t);

struct FlowTrajectory {
  UnitTangent start;
  double time = 0.0;
  std::vector<FlowSegment> segments;
  GroupWord deck_word;  // one letter per side crossing, appended on the right
  UnitTangent end;      // pulled back into the fundamental polygon
};

struct CurveComponent {
  GroupWord word;
  double weight = 1.0;
};

struct WeightedMultiCurve {
  std::vector<CurveComponent> components;
};

struct FlowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flow for hyperbolic time T from v (based in the fundamental polygon).
// Deterministic; near-vertex passes restart from a slightly rotated vector.
FlowTrajectory flow(const SurfacePresentation& s, const UnitTangent& v, double T);

// Close up the trajectory: the free homotopy class of the loop obtained by
// joining the endpoint back to the start, weight 1.
WeightedMultiCurve close_trajectory(const SurfacePresentation& s,
                                    const FlowTrajectory& traj);

// Rescale a closed-up curve so its hyperbolic length is pi*Area(X)/2.
WeightedMultiCurve liouville_approximant(const SurfacePresentation& s,
                                         const WeightedMultiCurve& g);

// Liouville-distributed tangent: base hyperbolic-area-uniform over the
// polygon, direction uniform. Deterministic per seed.
UnitTangent sample_tangent(const SurfacePresentation& s, std::uint64_t seed);

void save_curve(const WeightedMultiCurve& c, std::ostream& os);
WeightedMultiCurve load_curve(std::istream& is, int genus);

}  // namespace extlen
