#include "ldp/verify.hpp"

#include <algorithm>
#include <cmath>

namespace ldp {

SweepReport ldp_sweep(const SpecFamily& family, const std::vector<double>& eps_list,
                      const Path& center, double rho, long long mc_budget,
                      const SweepOptions& opt) {
  SweepReport report;
  std::vector<double> eps_sorted = eps_list;
  std::sort(eps_sorted.rbegin(), eps_sorted.rend());

  for (double eps : eps_sorted) {
    ChainSpec spec = family(eps);
    if (report.model_id.empty()) report.model_id = spec.model_id;

    SweepRow row;
    row.epsilon = eps;

    auto ball = ball_infimum(spec, center, rho, EvalMode::Limit, opt.minimize);
    row.i_ball = ball.action.value;

    TubeEstimate est;
    bool tilted_done = false;
    if (!opt.force_direct && std::isfinite(ball.action.value)) {
      try {
        auto sched = make_tilt_schedule(spec, ball.path);
        est = tube_probability_tilted(spec, center, rho, sched, mc_budget, opt.seed,
                                      opt.mc);
        tilted_done = true;
      } catch (const std::exception&) {
        // reference unusable for tilting (boundary velocities); fall through
      }
    }
    if (!tilted_done)
      est = tube_probability_mc(spec, center, rho, mc_budget, opt.seed, opt.mc);

    row.estimator = est.estimator;
    row.p_hat = est.p_hat;
    row.stderr_ = est.stderr_;
    if (est.p_hat > 0) {
      row.neg_eps_log_p = -eps * std::log(est.p_hat);
    } else {
      row.neg_eps_log_p = kInf;
      row.p_zero = true;
    }
    row.gap_defined = !row.p_zero && std::isfinite(row.i_ball);
    row.gap = row.gap_defined ? row.neg_eps_log_p - row.i_ball : 0.0;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<ConvergenceRow> convergence_check_lagrangian(
    const SpecFamily& family, const std::vector<double>& eps_list,
    const ConvergenceGrids& grids) {
  std::vector<ConvergenceRow> rows;
  std::vector<double> eps_sorted = eps_list;
  std::sort(eps_sorted.rbegin(), eps_sorted.rend());
  for (double eps : eps_sorted) {
    ChainSpec spec = family(eps);
    ConvergenceRow row;
    row.epsilon = eps;
    for (double s : grids.s_values) {
      for (const auto& u : grids.u_values) {
        for (const auto& v : grids.v_values) {
          double l_eps = log_mgf(spec, EvalMode::FiniteEps, s, u, v);
          double l_lim = log_mgf(spec, EvalMode::Limit, s, u, v);
          row.sup_gap_L = std::max(row.sup_gap_L, std::abs(l_eps - l_lim));
        }
        for (const auto& vs : grids.vstar_values) {
          double a = legendre_transform(spec, EvalMode::FiniteEps, s, u, vs).value;
          double b = legendre_transform(spec, EvalMode::Limit, s, u, vs).value;
          row.sup_gap_Lstar = std::max(row.sup_gap_Lstar, std::abs(a - b));
        }
      }
    }
    rows.push_back(row);
  }
  return rows;
}

ConjugacyReport conjugacy_check(const ChainSpec& spec, EvalMode mode, double r,
                                const std::vector<ConjugacyPoint>& points,
                                double grid_step) {
  ConjugacyReport rep;
  rep.grid_step = grid_step;
  rep.r = r;
  for (const auto& p : points) {
    double lhs = legendre_of_reg(spec, mode, p.s, p.u, p.vstar, r, grid_step);
    double rhs = reg_legendre(spec, mode, p.s, p.u, p.vstar, r, grid_step);
    double gap = std::abs(lhs - rhs);
    rep.per_point.push_back(gap);
    rep.max_discrepancy = std::max(rep.max_discrepancy, gap);
  }
  return rep;
}

std::vector<BoundaryProbeRow> boundary_cost_probe(const ChainSpec& spec, EvalMode mode,
                                                  double s, const Vec& vstar,
                                                  const std::vector<Vec>& approach) {
  if (spec.domain.is_all())
    throw ModelError("boundary_cost_probe: the domain has no boundary");
  std::vector<BoundaryProbeRow> rows;
  for (const auto& u : approach) {
    if (!spec.domain.strictly_inside(u))
      throw ModelError("boundary_cost_probe: approach point not in the interior");
    BoundaryProbeRow row;
    row.dist = spec.domain.dist_to_complement(u);
    row.lstar = legendre_transform(spec, mode, s, u, vstar).value;
    row.dist_times_lstar =
        std::isfinite(row.lstar) ? row.dist * row.lstar : kInf;
    rows.push_back(row);
  }
  return rows;
}

} // namespace ldp
