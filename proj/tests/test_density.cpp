#include <random>
#include <sstream>

#include "doctest.h"
#include "extlen/density.hpp"

using namespace extlen;

namespace {
const SurfacePresentation& octagon() {
  static SurfacePresentation s = build_surface(2);
  return s;
}

ConformalDensity test_bumps(double a1 = 0.3, double a2 = -0.15) {
  return ConformalDensity::with_bumps(
      octagon(),
      {{Cx(0.15, 0.1), 0.5, a1}, {Cx(-0.3, 0.25), 0.4, a2}});
}

std::mt19937 rng(2024);

ConformalDensity random_bumps() {
  std::uniform_real_distribution<double> pos(-0.35, 0.35), amp(-0.4, 0.4),
      width(0.3, 0.7);
  return ConformalDensity::with_bumps(
      octagon(),
      {{Cx(pos(rng), pos(rng)), width(rng), amp(rng)},
       {Cx(pos(rng), pos(rng)), width(rng), amp(rng)}},
      2);
}
}  // namespace

TEST_CASE("hyperbolic density area") {
  const auto& s = octagon();
  QuadResult a = area(ConformalDensity::hyperbolic(s));
  CHECK(a.value == doctest::Approx(4.0 * kPi).epsilon(1e-6));
  CHECK(a.error < 1e-6 * a.value);

  QuadResult a3 = area(ConformalDensity::hyperbolic(s, 3.0));
  CHECK(a3.value == doctest::Approx(9.0 * 4.0 * kPi).epsilon(1e-6));
}

TEST_CASE("bump density area against a finer independent rule") {
  // Shallow orbit keeps the oracle loop cheap; both rules see the same rho.
  ConformalDensity rho = ConformalDensity::with_bumps(
      octagon(), {{Cx(0.15, 0.1), 0.5, 0.3}, {Cx(-0.3, 0.25), 0.4, -0.15}}, 2);
  QuadResult a = area(rho);
  CHECK(a.value > 0.0);

  // Independent oracle: flat midpoint grid in fan coordinates, high count.
  const auto& s = octagon();
  double oracle = 0.0;
  int M = 700;
  for (int i = 0; i < 8; ++i) {
    const Geodesic& g = s.sides[i];
    double th0 = std::arg(s.polygon[i] - g.center);
    double dth = std::remainder(
        std::arg(s.polygon[(i + 1) % 8] - g.center) - th0, 2 * kPi);
    for (int cu = 0; cu < M; ++cu) {
      Cx gamma = g.center + std::polar(g.radius, th0 + (cu + 0.5) / M * dth);
      Cx dgamma = Cx(0, dth) * (gamma - g.center);
      double cross = std::abs(gamma.real() * dgamma.imag() -
                              gamma.imag() * dgamma.real());
      for (int cs = 0; cs < M; ++cs) {
        double sv = (cs + 0.5) / M;
        double v = rho(sv * gamma);
        oracle += sv * cross * v * v / (M * M);
      }
    }
  }
  CHECK(a.value == doctest::Approx(oracle).epsilon(1e-5));
}

TEST_CASE("pairing compatibility residual") {
  const auto& s = octagon();
  ConformalDensity rho = test_bumps();
  for (int i = 0; i < 8; ++i) {
    MobiusMap m = s.generator_map(s.crossing_letter(i));
    int partner = s.pairing[i].partner;
    for (double t : {0.1, 0.35, 0.5, 0.8}) {
      DiskPoint z = geodesic_point(s.polygon[partner],
                                   s.polygon[(partner + 1) % 8], t);
      DiskPoint mz = m.apply(z);
      double deriv = (1.0 - std::norm(mz)) / (1.0 - std::norm(z));
      CHECK(std::abs(rho(mz) * deriv - rho(z)) < 1e-6 * rho(z));
    }
  }
}

TEST_CASE("lengths along trajectories") {
  const auto& s = octagon();
  ConformalDensity rx = ConformalDensity::hyperbolic(s);
  UnitTangent v = sample_tangent(s, 5);
  double T = 37.0;
  FlowTrajectory tr = flow(s, v, T);
  QuadResult l = length_along(rx, tr.segments);
  CHECK(l.value == doctest::Approx(T).epsilon(1e-6));

  // Additivity over concatenation.
  FlowTrajectory t1 = flow(s, v, 17.0);
  FlowTrajectory t2 = flow(s, t1.end, 20.0);
  ConformalDensity rho = test_bumps();
  double whole = length_along(rho, tr.segments).value;
  double parts = length_along(rho, t1.segments).value +
                 length_along(rho, t2.segments).value;
  CHECK(whole == doctest::Approx(parts).epsilon(1e-9));

  // Scaling.
  CHECK(length_along(rho.rescaled(2.5), tr.segments).value ==
        doctest::Approx(2.5 * whole).epsilon(1e-12));

  // Point-to-point geodesic segment under rho_X is the hyperbolic distance.
  DiskPoint z(0.2, -0.1), w(-0.3, 0.4);
  CHECK(length_along(rx, z, w).value ==
        doctest::Approx(hyp_distance(z, w)).epsilon(1e-9));
}

TEST_CASE("curve length under the hyperbolic density") {
  const auto& s = octagon();
  ConformalDensity rx = ConformalDensity::hyperbolic(s);
  WeightedMultiCurve c{{{GroupWord({1}), 2.0}, {GroupWord({1, 2}), 0.5}}};
  double expect = 2.0 * s.geodesic_length(GroupWord({1})) +
                  0.5 * s.geodesic_length(GroupWord({1, 2}));
  CHECK(curve_rho_length(rx, c).value == doctest::Approx(expect).epsilon(1e-8));

  // Doubling weights doubles the value.
  WeightedMultiCurve c2 = c;
  for (auto& comp : c2.components) comp.weight *= 2.0;
  ConformalDensity rho = test_bumps();
  CHECK(curve_rho_length(rho, c2).value ==
        doctest::Approx(2.0 * curve_rho_length(rho, c).value).epsilon(1e-10));
}

TEST_CASE("birkhoff averages") {
  const auto& s = octagon();
  UnitTangent v = sample_tangent(s, 11);
  CHECK(birkhoff_average(ConformalDensity::hyperbolic(s), v, 25.0) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(birkhoff_average(ConformalDensity::hyperbolic(s, 1.7), v, 25.0) ==
        doctest::Approx(1.7).epsilon(1e-9));

  // Long-time average approaches the space average (ergodicity).
  ConformalDensity rho = test_bumps();
  double space = polygon_integral(s, [&](const DiskPoint& z) {
                   return rho(z) * hyperbolic_density(z);
                 }).value /
                 s.area();
  double acc = 0.0;
  int seeds = 4;
  for (int k = 1; k <= seeds; ++k)
    acc += birkhoff_average(rho, sample_tangent(s, 600 + k), 3000.0);
  CHECK(acc / seeds == doctest::Approx(space).epsilon(0.05));
}

TEST_CASE("hopf ratio and its bound") {
  const auto& s = octagon();
  CHECK(hopf_bound(s) == doctest::Approx(std::pow(kPi, 1.5)).epsilon(1e-12));

  UnitTangent v = sample_tangent(s, 21);
  WeightedMultiCurve G =
      liouville_approximant(s, close_trajectory(s, flow(s, v, 150.0)));
  ConformalDensity rx = ConformalDensity::hyperbolic(s);
  // Under rho_X the normalization makes the ratio hit the bound exactly.
  CHECK(hopf_ratio(rx, G) == doctest::Approx(hopf_bound(s)).epsilon(1e-6));
  // Scale invariance.
  ConformalDensity rho = test_bumps();
  CHECK(hopf_ratio(rho.rescaled(3.0), G) ==
        doctest::Approx(hopf_ratio(rho, G)).epsilon(1e-9));
}

TEST_CASE("cauchy-schwarz") {
  const auto& s = octagon();
  auto [l0, r0] = cauchy_schwarz_check(ConformalDensity::hyperbolic(s));
  CHECK(l0 == doctest::Approx(r0).epsilon(1e-6));
  auto [l1, r1] = cauchy_schwarz_check(ConformalDensity::hyperbolic(s, 0.4));
  CHECK(l1 == doctest::Approx(r1).epsilon(1e-6));

  auto [lb, rb] = cauchy_schwarz_check(test_bumps());
  CHECK(lb < rb);

  for (int i = 0; i < 12; ++i) {
    auto [lhs, rhs] = cauchy_schwarz_check(random_bumps());
    CHECK(lhs <= rhs * (1.0 + 1e-9));
  }
}

TEST_CASE("density serialization") {
  ConformalDensity rho = test_bumps(0.2, 0.1);
  std::stringstream ss;
  rho.save(ss);
  ConformalDensity back = ConformalDensity::load(ss, octagon());
  for (DiskPoint z : {Cx(0.0, 0.0), Cx(0.3, -0.2), Cx(-0.5, 0.4)})
    CHECK(back(z) == rho(z));

  std::stringstream hs;
  ConformalDensity::hyperbolic(octagon(), 2.0).save(hs);
  CHECK(ConformalDensity::load(hs, octagon())(Cx(0.1, 0.1)) ==
        doctest::Approx(2.0 * hyperbolic_density(Cx(0.1, 0.1))));
}
