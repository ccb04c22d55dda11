#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ldp/action.hpp"
#include "ldp/simulate.hpp"

#include <cmath>
#include <set>

using namespace ldp;

TEST_CASE("sample chain basics") {
  auto walk = builtin_symmetric_walk(1, 0.01, 1.0);
  auto traj = sample_chain(walk, 123);
  CHECK(traj.steps() == 100);
  for (long long k = 0; k < traj.steps(); ++k) {
    long long inc = traj.states[k + 1][0] - traj.states[k][0];
    CHECK(std::abs(inc) == 1); // jumps are +-1
  }
  // deterministic given the seed
  auto again = sample_chain(walk, 123);
  CHECK(again.states == traj.states);
  auto other = sample_chain(walk, 124);
  CHECK(other.states != traj.states);
}

TEST_CASE("curie-weiss never jumps up from m=1") {
  auto cw = builtin_curie_weiss(1.5, 0.0, 1.0, 0.01, 0.5, 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto traj = sample_chain(cw, seed);
    CHECK(traj.states[1][0] - traj.states[0][0] <= 0);
    for (const auto& g : traj.states) CHECK(0.01 * g[0] <= 1.0 + 1e-12);
  }
}

TEST_CASE("step frequencies match the law within binomial bands") {
  auto walk = builtin_symmetric_walk(1, 0.01, 1.0);
  long long plus = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    auto traj = sample_chain(walk, seed);
    for (long long k = 0; k < traj.steps(); ++k) {
      plus += traj.states[k + 1][0] > traj.states[k][0];
      ++total;
    }
  }
  double p = static_cast<double>(plus) / static_cast<double>(total);
  double band = 4 * std::sqrt(0.25 / static_cast<double>(total));
  CHECK(std::abs(p - 0.5) <= band);
}

TEST_CASE("interpolation") {
  auto walk = builtin_symmetric_walk(1, 0.1, 1.0);
  auto traj = sample_chain(walk, 5);
  auto y = interpolate(traj);
  // exact at microscopic knots
  for (long long k = 0; k <= traj.steps(); ++k)
    CHECK(y.at(0.1 * k)[0] ==
          doctest::Approx(0.1 * traj.states[k][0]).epsilon(1e-15));
  // all chords lie in conv(jumps) = [-1, 1]
  for (std::size_t i = 0; i < y.times.size(); ++i)
    for (std::size_t j = i + 1; j < y.times.size(); ++j) {
      double chord = (y.knots[j][0] - y.knots[i][0]) / (y.times[j] - y.times[i]);
      CHECK(std::abs(chord) <= 1.0 + 1e-12);
    }

  // a constant trajectory interpolates to a constant path
  Trajectory flat;
  flat.epsilon = 0.1;
  flat.states = {{3}, {3}, {3}};
  auto fy = interpolate(flat);
  for (double t : {0.0, 0.05, 0.2}) CHECK(fy.at(t)[0] == doctest::Approx(0.3));

  // step mode holds the previous value strictly inside each interval
  auto z = interpolate(traj, InterpMode::Step);
  CHECK(z.at(0.1 * 0.5)[0] == doctest::Approx(0.1 * traj.states[0][0]));
}

TEST_CASE("exhaustive tube probabilities at tiny scale") {
  // K = 1: every outcome (including the spread-out initial points) stays
  // within a tube slightly wider than 2*eps; membership is strict, so the
  // radius is padded past the extreme reachable point
  auto w1 = builtin_symmetric_walk(1, 0.5, 0.5);
  Path zero = constant_path({0.0}, 0.5);
  CHECK(exhaustive_tube_probability(w1, zero, 2 * 0.5 * 1.01).p_hat ==
        doctest::Approx(1.0).epsilon(1e-12));

  // K = 2 with rho = 1.5*eps: the two monotone sequences reach |2*eps| and drop out
  auto w2 = builtin_symmetric_walk(1, 0.5, 1.0);
  Path zero2 = constant_path({0.0}, 1.0);
  auto exact = exhaustive_tube_probability(w2, zero2, 1.5 * 0.5);
  CHECK(exact.p_hat == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(exact.stderr_ == 0.0);

  // cap exceeded names the required cap
  auto big = builtin_symmetric_walk(1, 0.01, 1.0);
  CHECK_THROWS_AS(exhaustive_tube_probability(big, zero2, 0.1, 1 << 20), CapError);
  try {
    exhaustive_tube_probability(big, zero2, 0.1, 1 << 20);
  } catch (const CapError& e) {
    CHECK(std::string(e.what()).find("cap") != std::string::npos);
  }
}

TEST_CASE("direct mc against exhaustive and trivial bounds") {
  auto spec = builtin_symmetric_walk(1, 1.0 / 12, 1.0);
  Path zero = constant_path({0.0}, 1.0);

  auto exact = exhaustive_tube_probability(spec, zero, 0.3);
  auto mc = tube_probability_mc(spec, zero, 0.3, 50000, 99);
  CHECK(std::abs(mc.p_hat - exact.p_hat) <= 4 * mc.stderr_ + 1e-9);

  // huge rho: certainty
  auto sure = tube_probability_mc(spec, zero, 3.0, 1000, 1);
  CHECK(sure.p_hat == 1.0);

  // super-hull-velocity center with a small tube: impossible
  Path fast({0.0, 1.0}, {{0.0}, {1.5}});
  CHECK(tube_probability_mc(spec, fast, 0.2, 1000, 1).p_hat == 0.0);
  CHECK(exhaustive_tube_probability(spec, fast, 0.2).p_hat == 0.0);
}

TEST_CASE("tilt schedule") {
  auto walk = builtin_symmetric_walk(1, 0.01, 1.0);
  auto lazy = make_tilt_schedule(walk, constant_path({0.0}, 1.0));
  CHECK(lazy.duals[0][0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(lazy.laws[0].prob[0] == doctest::Approx(0.5).epsilon(1e-9));

  auto sched = make_tilt_schedule(walk, straight_path({0.0}, {0.5}, 1.0, 1));
  int plus = walk.jump_set.vectors[0][0] == 1 ? 0 : 1;
  CHECK(sched.laws[0].prob[plus] == doctest::Approx(0.75).epsilon(1e-9));

  // tilted mean equals the segment velocity on a random reference
  Path ref({0.0, 0.5, 1.0}, {{0.0}, {0.3}, {0.15}});
  auto s2 = make_tilt_schedule(walk, ref);
  for (int i = 0; i < 2; ++i) {
    double mean = 0;
    for (std::size_t j = 0; j < s2.laws[i].prob.size(); ++j)
      mean += s2.laws[i].prob[j] * walk.jump_set.vec(static_cast<int>(j))[0];
    CHECK(mean == doctest::Approx(ref.velocity(i)[0]).epsilon(1e-9));
  }

  // vertex velocity is rejected
  CHECK_THROWS_AS(make_tilt_schedule(walk, straight_path({0.0}, {1.0}, 1.0, 1)),
                  ModelError);
}

TEST_CASE("zero tilt reproduces the direct sampler exactly") {
  auto walk = builtin_symmetric_walk(1, 0.05, 1.0);
  Path center = constant_path({0.0}, 1.0);
  auto sched = make_tilt_schedule(walk, constant_path({0.0}, 1.0));
  auto direct = tube_probability_mc(walk, center, 0.25, 20000, 7);
  auto tilted = tube_probability_tilted(walk, center, 0.25, sched, 20000, 7);
  CHECK(tilted.p_hat == doctest::Approx(direct.p_hat).epsilon(1e-12));
  CHECK(tilted.weight_max == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tilted estimator against the exhaustive oracle") {
  auto spec = builtin_symmetric_walk(1, 1.0 / 12, 1.0);
  Path center = straight_path({0.0}, {0.5}, 1.0, 1);
  auto exact = exhaustive_tube_probability(spec, center, 0.25);
  auto sched = make_tilt_schedule(spec, straight_path({0.0}, {0.5}, 1.0, 1));
  auto tilted = tube_probability_tilted(spec, center, 0.25, sched, 50000, 11);
  CHECK(std::abs(tilted.p_hat - exact.p_hat) <= 3 * tilted.stderr_ + 1e-9);
}

TEST_CASE("change of measure identity is exact") {
  auto spec = builtin_symmetric_walk(1, 1.0 / 12, 1.0);
  Path center = straight_path({0.0}, {0.5}, 1.0, 1);
  auto sched = make_tilt_schedule(spec, straight_path({0.0}, {0.4}, 1.0, 2));
  double exact = exhaustive_tube_probability(spec, center, 0.25).p_hat;
  double tilted = exhaustive_tilted_expectation(spec, center, 0.25, sched);
  CHECK(std::abs(exact - tilted) <= 1e-12);
}

TEST_CASE("determinism across thread counts") {
  auto spec = builtin_symmetric_walk(1, 0.02, 1.0);
  Path center = straight_path({0.0}, {0.3}, 1.0, 1);
  McOptions one;
  one.threads = 1;
  McOptions many;
  many.threads = 7;
  auto a = tube_probability_mc(spec, center, 0.2, 30000, 5, one);
  auto b = tube_probability_mc(spec, center, 0.2, 30000, 5, many);
  CHECK(a.p_hat == b.p_hat);
  CHECK(a.stderr_ == b.stderr_);

  auto sched = make_tilt_schedule(spec, straight_path({0.0}, {0.3}, 1.0, 1));
  auto ta = tube_probability_tilted(spec, center, 0.2, sched, 30000, 5, one);
  auto tb = tube_probability_tilted(spec, center, 0.2, sched, 30000, 5, many);
  CHECK(ta.p_hat == tb.p_hat);
  CHECK(ta.stderr_ == tb.stderr_);
  CHECK(ta.ess == tb.ess);
}

TEST_CASE("covering count") {
  auto res = covering_count(std::exp(1.0), 1.0, 2, 1);
  CHECK(res.bound == doctest::Approx(std::exp(6.0)).epsilon(1e-12));
  CHECK(res.bound == doctest::Approx(403.4288).epsilon(1e-4));
  CHECK_THROWS_AS(covering_count(1.0, 0.5, 1, 1), ModelError); // rho <= 2*eta

  // near the eta -> rho/2 limit the bound approaches e^{dn(log 2 + 2)}
  auto lim = covering_count(1.0, 0.4999, 1, 1);
  CHECK(lim.bound ==
        doctest::Approx(std::exp(std::log(2.0) + 2.0)).epsilon(1e-3));

  // explicit covering: every point of the rho-ball is within eta of a center
  auto cov = covering_count(1.0, 0.3, 1, 1, true);
  CHECK(!cov.lattice_points.empty());
  for (double x = -1.0; x <= 1.0; x += 0.01) {
    double best = kInf;
    for (const auto& c : cov.lattice_points) best = std::min(best, std::abs(x - c[0]));
    CHECK(best <= 0.3 + 1e-9);
  }
}
