#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ldp/verify.hpp"

#include <cmath>

using namespace ldp;

TEST_CASE("ldp sweep trivial regimes") {
  SpecFamily walk_family = [](double eps) {
    return builtin_symmetric_walk(1, eps, 1.0);
  };
  Path center = straight_path({0.0}, {0.2}, 1.0, 1);

  SweepOptions opt;
  opt.seed = 1;
  opt.mc.threads = 2;

  // huge tube: probability one and zero infimum on every row
  opt.force_direct = true; // indicator estimate is exact at p = 1
  auto easy = ldp_sweep(walk_family, {0.05, 0.02}, center, 5.0, 2000, opt);
  opt.force_direct = false;
  REQUIRE(easy.rows.size() == 2);
  CHECK(easy.rows[0].epsilon > easy.rows[1].epsilon); // sorted by decreasing eps
  for (const auto& row : easy.rows) {
    CHECK(row.p_hat == 1.0);
    CHECK(row.neg_eps_log_p == doctest::Approx(0.0));
    CHECK(row.i_ball == doctest::Approx(0.0).epsilon(1e-8));
  }

  // inadmissible center with a small tube: both sides degenerate
  Path fast({0.0, 1.0}, {{0.0}, {1.6}});
  auto hard = ldp_sweep(walk_family, {0.05}, fast, 0.05, 2000, opt);
  REQUIRE(hard.rows.size() == 1);
  CHECK(hard.rows[0].p_zero);
  CHECK(hard.rows[0].neg_eps_log_p == kInf);
  CHECK(hard.rows[0].i_ball == kInf);
  CHECK(!hard.rows[0].gap_defined);
}

TEST_CASE("ldp sweep gap shrinks with eps") {
  SpecFamily walk_family = [](double eps) {
    return builtin_symmetric_walk(1, eps, 1.0);
  };
  Path center = straight_path({0.0}, {0.5}, 1.0, 1);
  SweepOptions opt;
  opt.seed = 3;
  opt.mc.threads = 4;
  auto report = ldp_sweep(walk_family, {0.02, 0.01}, center, 0.1, 40000, opt);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].gap_defined);
  CHECK(report.rows[1].gap_defined);
  CHECK(std::abs(report.rows[1].gap) < std::abs(report.rows[0].gap));
}

TEST_CASE("lagrangian convergence table") {
  ConvergenceGrids grids;
  grids.s_values = {0.0, 0.5};
  grids.u_values = {{-0.3}, {0.0}, {0.4}};
  grids.v_values = {{-1.0}, {0.0}, {1.5}};
  grids.vstar_values = {{-0.5}, {0.0}, {0.4}};

  // f1 == 0: finite-eps and limit objects coincide identically
  SpecFamily cw_family = [](double eps) {
    return builtin_curie_weiss(1.4, 0.0, 1.0, eps, 1.0, 0.0);
  };
  auto rows = convergence_check_lagrangian(cw_family, {0.04, 0.02, 0.01}, grids);
  for (const auto& row : rows) {
    CHECK(row.sup_gap_L == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(row.sup_gap_Lstar == doctest::Approx(0.0).epsilon(1e-9));
  }

  // constant f1 = K shifts L_eps by exactly eps*K
  const double kBound = 0.7;
  SpecFamily shifted = [kBound](double eps) {
    RateField field;
    field.f0 = [](double, const Vec&, int) { return -std::log(2.0); };
    field.f1 = [kBound](double, const Vec&, int) { return kBound; };
    field.f_limit = field.f0;
    field.f1_bound = kBound;
    return make_chain_spec(eps, JumpSet({{1}, {-1}}), Domain::all(1),
                           std::move(field), {0.0}, 1.0, "shifted_walk");
  };
  rows = convergence_check_lagrangian(shifted, {0.04, 0.02, 0.01}, grids);
  double prev = kInf;
  for (const auto& row : rows) {
    CHECK(row.sup_gap_L == doctest::Approx(row.epsilon * kBound).epsilon(1e-9));
    CHECK(row.sup_gap_L <= prev + 1e-12); // monotone under halving
    prev = row.sup_gap_L;
  }
}

TEST_CASE("conjugacy of the regularized pair") {
  auto walk = builtin_symmetric_walk(1);
  std::vector<ConjugacyPoint> pts{{0.2, {0.0}, {0.3}}, {0.7, {0.1}, {-0.6}}};
  auto rep = conjugacy_check(walk, EvalMode::Limit, 0.05, pts, 0.01);
  CHECK(rep.max_discrepancy <= 1e-6); // homogeneous: regularization inert

  auto cw = builtin_curie_weiss(1.5);
  std::vector<ConjugacyPoint> cwpts{
      {0.3, {0.2}, {0.4}}, {0.8, {-0.4}, {-0.2}}, {0.1, {0.5}, {0.9}}};
  auto cwrep = conjugacy_check(cw, EvalMode::Limit, 0.05, cwpts, 5e-3);
  CHECK(cwrep.max_discrepancy <= 5e-3);
}

TEST_CASE("boundary cost probe") {
  auto walk = builtin_symmetric_walk(1);
  CHECK_THROWS_AS(
      boundary_cost_probe(walk, EvalMode::Limit, 0.0, {0.0}, {{0.5}}),
      ModelError); // no boundary to probe

  auto cw = builtin_curie_weiss(1.2);
  std::vector<Vec> approach;
  for (int k = 1; k <= 16; ++k) approach.push_back({1.0 - std::pow(2.0, -k)});

  // lazy-velocity cost stays bounded, the product vanishes
  auto rows = boundary_cost_probe(cw, EvalMode::Limit, 0.0, {0.0}, approach);
  for (const auto& row : rows) CHECK(row.lstar < 5.0);
  CHECK(rows.back().dist_times_lstar < rows.front().dist_times_lstar + 1e-12);
  CHECK(rows.back().dist_times_lstar < 1e-2);

  // outward vertex velocity: cost diverges like -log(1-m), product still -> 0
  auto vrows = boundary_cost_probe(cw, EvalMode::Limit, 0.0, {2.0}, approach);
  CHECK(vrows.back().lstar > vrows.front().lstar);
  CHECK(vrows.back().lstar > 2.0);
  CHECK(vrows.back().dist_times_lstar < 0.05);

  CHECK_THROWS_AS(
      boundary_cost_probe(cw, EvalMode::Limit, 0.0, {0.0}, {{1.0}}),
      ModelError); // approach point must be interior
}
