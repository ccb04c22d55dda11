#pragma once

#include "ldp/action.hpp"
#include "ldp/simulate.hpp"

#include <functional>

namespace ldp {

using SpecFamily = std::function<ChainSpec(double epsilon)>;

struct SweepRow {
  double epsilon = 0;
  std::string estimator;
  double p_hat = 0;
  double stderr_ = 0;
  double neg_eps_log_p = 0;  // +inf when p_hat == 0
  bool p_zero = false;
  double i_ball = 0;
  double gap = 0;  // neg_eps_log_p - i_ball
  bool gap_defined = false;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // sorted by decreasing epsilon
  std::string model_id;
  std::string tube;
};

struct SweepOptions {
  std::uint64_t seed = 42;
  McOptions mc;
  MinimizeOptions minimize;
  bool force_direct = false;
};

/// For each epsilon: estimate the tube probability (tilted sampler around the
/// ball-infimum argmin, falling back to direct MC), compute the ball infimum
/// of the action, and report -eps*log(p_hat) against it. Reporting only, no
/// assertion.
SweepReport ldp_sweep(const SpecFamily& family, const std::vector<double>& eps_list,
                      const Path& center, double rho, long long mc_budget,
                      const SweepOptions& opt = {});

struct ConvergenceRow {
  double epsilon = 0;
  double sup_gap_L = 0;      // sup |L_eps - L| over the sample grid
  double sup_gap_Lstar = 0;  // sup |L*_eps - L*| over the sample grid
};

struct ConvergenceGrids {
  std::vector<double> s_values;
  std::vector<Vec> u_values;      // compact S inside int(domain)
  std::vector<Vec> v_values;      // tilt arguments for the L comparison
  std::vector<Vec> vstar_values;  // velocities in ri(conv(jumps)) for L*
};

/// Sampled uniform-convergence table for L_eps -> L and L*_eps -> L* as
/// epsilon halves.
std::vector<ConvergenceRow> convergence_check_lagrangian(
    const SpecFamily& family, const std::vector<double>& eps_list,
    const ConvergenceGrids& grids);

struct ConjugacyReport {
  double max_discrepancy = 0;
  Vec per_point;  // |Legendre(L^(r)) - L^(r)*| at each test point
  double grid_step = 0;
  double r = 0;
};

struct ConjugacyPoint {
  double s = 0;
  Vec u;
  Vec vstar;
};

/// Checks that the Legendre transform of the regularized Lagrangian agrees
/// with the regularized conjugate on the test points.
ConjugacyReport conjugacy_check(const ChainSpec& spec, EvalMode mode, double r,
                                const std::vector<ConjugacyPoint>& points,
                                double grid_step);

struct BoundaryProbeRow {
  double dist = 0;       // distance of u_k to the domain complement
  double lstar = 0;      // L*(s, u_k, vstar)
  double dist_times_lstar = 0;
};

/// Cost growth along an approach sequence to the domain boundary; the product
/// column must trend to zero for the boundedness condition to hold.
std::vector<BoundaryProbeRow> boundary_cost_probe(const ChainSpec& spec, EvalMode mode,
                                                  double s, const Vec& vstar,
                                                  const std::vector<Vec>& approach);

} // namespace ldp
