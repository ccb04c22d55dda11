#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ldp/action.hpp"
#include "ldp/rng.hpp"

#include <cmath>

using namespace ldp;

namespace {

double walk_lstar(double v) {
  if (v <= -1.0 || v >= 1.0)
    return std::abs(v) == 1.0 ? std::log(2.0) : kInf;
  return ((1 + v) / 2) * std::log(1 + v) + ((1 - v) / 2) * std::log(1 - v);
}

} // namespace

TEST_CASE("path basics and csv round trip") {
  Path p({0.0, 0.25, 1.0}, {{0.0}, {0.3}, {0.1}});
  CHECK(p.at(0.25)[0] == doctest::Approx(0.3));
  CHECK(p.at(0.625)[0] == doctest::Approx(0.2));
  CHECK(p.velocity(0)[0] == doctest::Approx(1.2));

  auto text = format_path_csv(p);
  auto q = parse_path_csv(text);
  REQUIRE(q.times.size() == p.times.size());
  for (std::size_t i = 0; i < p.times.size(); ++i) {
    CHECK(q.times[i] == p.times[i]);     // 17 significant digits are lossless
    CHECK(q.knots[i][0] == p.knots[i][0]);
  }

  CHECK_THROWS_AS(Path({0.0, 0.5, 0.5}, {{0.0}, {0.1}, {0.2}}), PathError);
  CHECK_THROWS_AS(parse_path_csv("t,x1\n0,0\n0.5,1\n0.25,2\n"), PathError);
  CHECK_THROWS_AS(parse_path_csv("no header\n0,0\n"), PathError);
}

TEST_CASE("sup distance is exact for piecewise-linear pairs") {
  Path a({0.0, 1.0}, {{0.0}, {1.0}});
  Path b({0.0, 0.5, 1.0}, {{0.0}, {0.9}, {1.0}});
  // max gap is at t=0.5 where a = 0.5 and b = 0.9
  CHECK(sup_distance(a, b) == doctest::Approx(0.4));
}

TEST_CASE("admissibility classification") {
  auto walk = builtin_symmetric_walk(1);
  auto cls = admissibility(straight_path({0.0}, {0.5}, 1.0, 4), walk);
  CHECK(cls.in_E);
  CHECK(cls.in_E_interior);
  CHECK(cls.in_D_interior);
  CHECK(cls.label() == "D-interior");

  cls = admissibility(straight_path({0.0}, {1.0}, 1.0, 4), walk);
  CHECK(cls.in_E);
  CHECK(!cls.in_E_interior); // vertex velocity

  cls = admissibility(straight_path({0.0}, {1.5}, 1.0, 4), walk);
  CHECK(!cls.admissible()); // faster than the maximal speed

  // Curie-Weiss at the boundary: outward velocity not in D_x
  auto cw = builtin_curie_weiss(1.0);
  Path to_edge({0.0, 1.0}, {{0.9}, {1.0}});
  auto edge_cls = admissibility(to_edge, cw);
  CHECK(edge_cls.in_D_bar);       // inward-or-lazy admissible up to the edge
  CHECK(!edge_cls.in_D_interior); // endpoint on the boundary
}

TEST_CASE("action values") {
  auto walk = builtin_symmetric_walk(1);
  // constant path at the zero-tilt mean costs nothing
  auto flat = action(constant_path({0.0}, 1.0, 4), walk, EvalMode::Limit);
  CHECK(flat.value == doctest::Approx(0.0).epsilon(1e-12));

  auto line = action(straight_path({0.0}, {0.5}, 1.0, 5), walk, EvalMode::Limit);
  CHECK(line.value == doctest::Approx(0.13081203594113694).epsilon(1e-9));

  auto fast = action(straight_path({0.0}, {1.5}, 1.0, 2), walk, EvalMode::Limit);
  CHECK(fast.value == kInf);

  // grid refinement leaves a homogeneous straight line unchanged
  QuadratureOptions q;
  q.max_bisections = 4;
  auto refined = action(straight_path({0.0}, {0.5}, 1.0, 1), walk, EvalMode::Limit, q);
  CHECK(refined.value == doctest::Approx(line.value).epsilon(1e-12));
}

TEST_CASE("jensen: straight chord is cheapest for frozen coefficients") {
  auto walk = builtin_symmetric_walk(1);
  CounterRng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Vec times{0.0, 0.3, 0.6, 1.0};
    std::vector<Vec> knots{{0.0}};
    for (int i = 1; i < 4; ++i)
      knots.push_back({knots.back()[0] +
                       0.25 * (2 * rng.next_double() - 1)});
    Path wiggly(times, knots);
    Path chord({0.0, 1.0}, {knots.front(), knots.back()});
    double aw = action(wiggly, walk, EvalMode::Limit).value;
    double ac = action(chord, walk, EvalMode::Limit).value;
    CHECK(aw >= ac - 1e-10);
  }
}

TEST_CASE("action gradient") {
  auto walk = builtin_symmetric_walk(1);
  // both segments share the velocity, the dual telescoping cancels
  auto grad = action_gradient(straight_path({0.0}, {0.5}, 1.0, 2), walk,
                              EvalMode::Limit);
  REQUIRE(grad.size() == 1);
  CHECK(grad[0][0] == doctest::Approx(0.0).epsilon(1e-9));

  // against finite differences on a perturbed path, space-dependent model
  auto cw = builtin_curie_weiss(1.4, 0.1, 1.0);
  Path p({0.0, 0.4, 0.7, 1.0}, {{0.1}, {0.25}, {0.2}, {0.35}});
  auto g = action_gradient(p, cw, EvalMode::Limit);
  const double h = 1e-6;
  for (std::size_t i = 1; i + 1 < p.knots.size(); ++i) {
    auto pp = p, pm = p;
    pp.knots[i][0] += h;
    pm.knots[i][0] -= h;
    double fd = (action(pp, cw, EvalMode::Limit).value -
                 action(pm, cw, EvalMode::Limit).value) /
                (2 * h);
    CHECK(g[i - 1][0] == doctest::Approx(fd).epsilon(1e-5));
  }

  // hull-boundary velocity: gradient refuses with advice
  Path edge({0.0, 0.5, 1.0}, {{0.0}, {0.5}, {1.0}});
  CHECK_THROWS_AS(action_gradient(edge, walk, EvalMode::Limit), NumericalError);
}

TEST_CASE("minimize action") {
  auto walk = builtin_symmetric_walk(1);
  auto res = minimize_action(walk, {0.0}, {0.5}, 6);
  // homogeneous model: the straight line is the minimizer
  Path straight = straight_path({0.0}, {0.5}, 1.0, 6);
  CHECK(sup_distance(res.path, straight) <= 1e-4);
  CHECK(res.action.value <=
        action(straight, walk, EvalMode::Limit).value + 1e-12);

  auto still = minimize_action(walk, {0.0}, {0.0}, 4);
  CHECK(still.action.value == doctest::Approx(0.0).epsilon(1e-10));

  CHECK_THROWS_AS(minimize_action(walk, {0.0}, {1.5}, 4), ModelError);

  // Curie-Weiss uphill crossing costs something
  auto cw = builtin_curie_weiss(2.0, 0.0, 1.0, 0.01, 2.0, 0.0);
  double mstar = 0.9575; // stable magnetization near tanh(2m)=m
  auto cross = minimize_action(cw, {mstar}, {-mstar}, 10);
  CHECK(cross.action.value > 0.01);
}

TEST_CASE("ball infimum") {
  auto walk = builtin_symmetric_walk(1);
  Path center = straight_path({0.0}, {0.5}, 1.0, 1);

  // big ball contains the zero-action constant path
  auto big = ball_infimum(walk, center, 10.0);
  CHECK(big.action.value <= 1e-8);

  auto tight = ball_infimum(walk, center, 0.05);
  CHECK(tight.action.value >= walk_lstar(0.45) - 1e-6);
  CHECK(tight.action.value <= walk_lstar(0.5) + 1e-6);
  CHECK(tight.constraint_active);

  // monotone nonincreasing in rho
  double prev = kInf;
  for (double rho : {0.02, 0.05, 0.1, 0.3}) {
    double val = ball_infimum(walk, center, rho).action.value;
    CHECK(val <= prev + 1e-9);
    prev = val;
  }

  // rho -> 0 recovers the center action
  auto narrow = ball_infimum(walk, center, 1e-4);
  CHECK(narrow.action.value ==
        doctest::Approx(walk_lstar(0.5)).epsilon(1e-2));

  // incompatible pinning
  Path far_center({0.0, 1.0}, {{5.0}, {5.5}});
  CHECK(ball_infimum(walk, far_center, 0.1).action.value == kInf);
}
