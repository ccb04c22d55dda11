#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ldp/legendre.hpp"
#include "ldp/rng.hpp"

#include <cmath>

using namespace ldp;

namespace {

// closed form for the 1-D symmetric walk: L*(v) on [-1,1]
double walk_lstar(double v) {
  if (v <= -1.0 || v >= 1.0)
    return std::abs(v) == 1.0 ? std::log(2.0) : kInf;
  return ((1 + v) / 2) * std::log(1 + v) + ((1 - v) / 2) * std::log(1 - v);
}

} // namespace

TEST_CASE("log-mgf closed forms") {
  auto walk = builtin_symmetric_walk(1);
  CHECK(log_mgf(walk, EvalMode::Limit, 0.0, {0.0}, {0.0}) == doctest::Approx(0.0));
  // log cosh 1
  CHECK(log_mgf(walk, EvalMode::Limit, 0.0, {0.0}, {1.0}) ==
        doctest::Approx(0.43378083048302720).epsilon(1e-12));
  CHECK(log_mgf(walk, EvalMode::Limit, 0.0, {0.0}, {1.0}) ==
        doctest::Approx(0.433780).epsilon(1e-5));

  auto flat = builtin_curie_weiss(0.0);
  CHECK(log_mgf(flat, EvalMode::FiniteEps, 0.0, {0.0}, {0.0}) ==
        doctest::Approx(0.0));
  // off the domain the convention is L = -inf
  auto cw = builtin_curie_weiss(1.0);
  CHECK(log_mgf(cw, EvalMode::Limit, 0.0, {1.5}, {0.3}) == -kInf);
}

TEST_CASE("L(s,u,0) = 0 wherever the law is normalized") {
  auto cw = builtin_curie_weiss(1.7, 0.3, 2.0);
  for (double m : {-0.9, -0.2, 0.0, 0.4, 0.95})
    for (double s : {0.0, 0.5, 3.0})
      CHECK(log_mgf(cw, EvalMode::FiniteEps, s, {m}, {0.0}) ==
            doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("tilted measure") {
  auto walk = builtin_symmetric_walk(1);
  auto base = tilted_measure(walk, EvalMode::Limit, 0.0, {0.0}, {0.0});
  CHECK(base.prob[0] == doctest::Approx(0.5));
  CHECK(base.prob[1] == doctest::Approx(0.5));

  // tilt log(3)/2 puts mass 3/4 on the +1 jump
  auto tilted = tilted_measure(walk, EvalMode::Limit, 0.0, {0.0},
                               {std::log(3.0) / 2});
  int plus = walk.jump_set.vectors[0][0] == 1 ? 0 : 1;
  CHECK(tilted.prob[plus] == doctest::Approx(0.75));

  auto cw = builtin_curie_weiss(1.2);
  for (double v : {-3.0, 0.0, 2.5}) {
    auto nu = tilted_measure(cw, EvalMode::FiniteEps, 0.0, {1.0}, {v});
    CHECK(nu.prob[0] == 0.0); // +2 impossible at m = 1 under any tilt
    double sum = nu.prob[0] + nu.prob[1] + nu.prob[2];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("gradient and Hessian moment identities") {
  auto walk = builtin_symmetric_walk(1);
  CHECK(mgf_grad(walk, EvalMode::Limit, 0.0, {0.0}, {1.0})[0] ==
        doctest::Approx(std::tanh(1.0)).epsilon(1e-12));
  CHECK(mgf_grad(walk, EvalMode::Limit, 0.0, {0.0}, {1.0})[0] ==
        doctest::Approx(0.761594).epsilon(1e-5));
  CHECK(mgf_hess(walk, EvalMode::Limit, 0.0, {0.0}, {0.0})[0][0] ==
        doctest::Approx(1.0));
}

TEST_CASE("derivatives match central finite differences") {
  auto walk2 = builtin_symmetric_walk(2);
  auto cw = builtin_curie_weiss(1.5, 0.1, 1.0);
  CounterRng rng(5);
  const double h = 1e-5;
  for (int trial = 0; trial < 40; ++trial) {
    // walk in d=2
    Vec v{2 * (2 * rng.next_double() - 1), 2 * (2 * rng.next_double() - 1)};
    Vec u{0.0, 0.0};
    Vec g = mgf_grad(walk2, EvalMode::Limit, 0.0, u, v);
    for (int c = 0; c < 2; ++c) {
      Vec vp = v, vm = v;
      vp[c] += h;
      vm[c] -= h;
      double fd = (log_mgf(walk2, EvalMode::Limit, 0.0, u, vp) -
                   log_mgf(walk2, EvalMode::Limit, 0.0, u, vm)) /
                  (2 * h);
      CHECK(g[c] == doctest::Approx(fd).epsilon(1e-6));
    }
    // Curie-Weiss in d=1
    double m = 0.9 * (2 * rng.next_double() - 1);
    double vv = 2 * (2 * rng.next_double() - 1);
    double gc = mgf_grad(cw, EvalMode::FiniteEps, 0.4, {m}, {vv})[0];
    double fd = (log_mgf(cw, EvalMode::FiniteEps, 0.4, {m}, {vv + h}) -
                 log_mgf(cw, EvalMode::FiniteEps, 0.4, {m}, {vv - h})) /
                (2 * h);
    CHECK(gc == doctest::Approx(fd).epsilon(1e-6));
    // Hessian vs gradient differences
    double hess = mgf_hess(cw, EvalMode::FiniteEps, 0.4, {m}, {vv})[0][0];
    double fdh = (mgf_grad(cw, EvalMode::FiniteEps, 0.4, {m}, {vv + h})[0] -
                  mgf_grad(cw, EvalMode::FiniteEps, 0.4, {m}, {vv - h})[0]) /
                 (2 * h);
    CHECK(hess == doctest::Approx(fdh).epsilon(1e-5));
    CHECK(hess >= -1e-10);
  }
}

TEST_CASE("legendre transform closed form and boundary handling") {
  auto walk = builtin_symmetric_walk(1);
  auto at = [&](double vstar) {
    return legendre_transform(walk, EvalMode::Limit, 0.0, {0.0}, {vstar});
  };

  auto zero = at(0.0);
  CHECK(zero.value == doctest::Approx(0.0).epsilon(1e-12));
  // zero is attained only at the tilted-zero mean
  CHECK(at(0.05).value > 1e-4);

  auto half = at(0.5);
  CHECK(half.value == doctest::Approx(0.13081203594113694).epsilon(1e-10));
  CHECK(half.dual[0] == doctest::Approx(std::atanh(0.5)).epsilon(1e-9));
  CHECK(half.flag == BoundaryFlag::Interior);

  auto vertex = at(1.0);
  CHECK(vertex.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(vertex.flag == BoundaryFlag::RelBoundary);
  auto vertex_m = at(-1.0);
  CHECK(vertex_m.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  auto outside = at(1.5);
  CHECK(outside.value == kInf);
  CHECK(outside.flag == BoundaryFlag::OutsideDomain);
}

TEST_CASE("fenchel identity and fenchel-young inequality") {
  auto cw = builtin_curie_weiss(1.8, 0.2, 1.5);
  CounterRng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    double m = 0.85 * (2 * rng.next_double() - 1);
    double s = 2 * rng.next_double();
    double vstar = 1.8 * (2 * rng.next_double() - 1);
    auto lp = legendre_transform(cw, EvalMode::FiniteEps, s, {m}, {vstar});
    REQUIRE(lp.flag == BoundaryFlag::Interior);
    double fenchel = lp.dual[0] * vstar -
                     log_mgf(cw, EvalMode::FiniteEps, s, {m}, lp.dual);
    CHECK(lp.value == doctest::Approx(fenchel).epsilon(1e-9));

    double v = 3 * (2 * rng.next_double() - 1);
    double lhs = v * vstar;
    double rhs = log_mgf(cw, EvalMode::FiniteEps, s, {m}, {v}) + lp.value;
    CHECK(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("grid oracle") {
  auto walk = builtin_symmetric_walk(1);
  auto zero = legendre_oracle_grid(walk, EvalMode::Limit, 0.0, {0.0}, {0.0},
                                   {-5.0}, {5.0}, 2001);
  CHECK(zero.value >= -1e-12);
  CHECK(zero.value <= 1e-6);

  auto half = legendre_oracle_grid(walk, EvalMode::Limit, 0.0, {0.0}, {0.5},
                                   {-5.0}, {5.0}, 100000);
  CHECK(half.value == doctest::Approx(0.130812).epsilon(1e-5));
  CHECK(half.value <= 0.13081203594113694 + 1e-12); // always a lower bound

  // outside the hull the sup diverges with the box
  double prev = -kInf;
  for (double b : {2.0, 4.0, 8.0}) {
    auto res = legendre_oracle_grid(walk, EvalMode::Limit, 0.0, {0.0}, {1.5},
                                    {-b}, {b}, 401);
    CHECK(res.value > prev);
    CHECK(res.max_on_box_boundary);
    prev = res.value;
  }
}

TEST_CASE("entropy oracle") {
  auto walk = builtin_symmetric_walk(1);
  // vertex: single-point feasible set, value -log nu0(+1) = log 2
  CHECK(entropy_rate(walk, EvalMode::Limit, 0.0, {0.0}, {1.0}, 1000, 1e-9) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-9));
  // mean of the base law: entropy zero
  CHECK(entropy_rate(walk, EvalMode::Limit, 0.0, {0.0}, {0.0}, 1000, 1e-9) ==
        doctest::Approx(0.0).epsilon(1e-9));
  CHECK(entropy_rate(walk, EvalMode::Limit, 0.0, {0.0}, {0.5}, 1000, 2.5e-3) ==
        doctest::Approx(0.130812).epsilon(5e-3));
  // infeasible mean
  CHECK(entropy_rate(walk, EvalMode::Limit, 0.0, {0.0}, {1.5}, 100, 1e-3) == kInf);
}

TEST_CASE("regularized lagrangians") {
  auto walk = builtin_symmetric_walk(1);
  // space-time homogeneous: regularization is inert
  for (double r : {0.01, 0.1, 0.5}) {
    CHECK(reg_lagrangian(walk, EvalMode::Limit, 0.3, {0.1}, {0.7}, r, r / 4) ==
          doctest::Approx(log_mgf(walk, EvalMode::Limit, 0.3, {0.1}, {0.7}))
              .epsilon(1e-12));
    CHECK(reg_legendre(walk, EvalMode::Limit, 0.3, {0.1}, {0.5}, r, r / 4) ==
          doctest::Approx(walk_lstar(0.5)).epsilon(1e-9));
  }

  auto cw = builtin_curie_weiss(1.5);
  double plain = legendre_transform(cw, EvalMode::Limit, 0.5, {0.5}, {0.4}).value;
  double reg = reg_legendre(cw, EvalMode::Limit, 0.5, {0.5}, {0.4}, 0.1, 0.02);
  CHECK(reg <= plain + 1e-12); // inf over a set containing the center

  // monotone in r: L^(r)* nonincreasing, L^(r) nondecreasing
  double prev_star = kInf, prev_l = -kInf;
  for (double r : {0.02, 0.04, 0.08, 0.16}) {
    double star = reg_legendre(cw, EvalMode::Limit, 0.5, {0.5}, {0.4}, r, 0.01);
    double l = reg_lagrangian(cw, EvalMode::Limit, 0.5, {0.5}, {0.8}, r, 0.01);
    CHECK(star <= prev_star + 1e-12);
    CHECK(l >= prev_l - 1e-12);
    prev_star = star;
    prev_l = l;
  }
}

TEST_CASE("envelope lagrangian") {
  auto walk = builtin_symmetric_walk(1);
  auto vals = envelope_lagrangian(walk, EvalMode::Limit, 0.2, {0.0}, {0.5},
                                  {0.2, 0.1, 0.05, 0.025}, 0.01);
  for (double v : vals) CHECK(v == doctest::Approx(walk_lstar(0.5)).epsilon(1e-9));

  auto cw = builtin_curie_weiss(1.5);
  double plain = legendre_transform(cw, EvalMode::Limit, 0.5, {0.3}, {0.4}).value;
  auto seq = envelope_lagrangian(cw, EvalMode::Limit, 0.5, {0.3}, {0.4},
                                 {1e-2, 1e-3}, 5e-4);
  CHECK(std::abs(seq.back() - plain) <= 1e-3);
}

TEST_CASE("dual norm grows toward the hull boundary") {
  auto walk = builtin_symmetric_walk(1);
  double prev = 0;
  for (double vstar : {0.2, 0.5, 0.8, 0.95, 0.99}) {
    auto lp = legendre_transform(walk, EvalMode::Limit, 0.0, {0.0}, {vstar});
    CHECK(norm(lp.dual) > prev);
    prev = norm(lp.dual);
  }
}

TEST_CASE("newton agrees with both oracles on random points") {
  auto cw = builtin_curie_weiss(1.3, 0.15, 2.0);
  CounterRng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    double m = 0.8 * (2 * rng.next_double() - 1);
    double s = rng.next_double();
    double vstar = 1.7 * (2 * rng.next_double() - 1);
    double newton = legendre_transform(cw, EvalMode::Limit, s, {m}, {vstar}).value;
    double grid = legendre_oracle_grid(cw, EvalMode::Limit, s, {m}, {vstar},
                                       {-6.0}, {6.0}, 100000)
                      .value;
    CHECK(std::abs(newton - grid) <= 1e-6);
    double entropy = entropy_rate(cw, EvalMode::Limit, s, {m}, {vstar}, 400, 6e-3);
    CHECK(std::abs(newton - entropy) <= 8e-3);
  }
}
