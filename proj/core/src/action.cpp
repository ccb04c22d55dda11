#include "ldp/action.hpp"

#include <algorithm>
#include <cmath>

namespace ldp {

std::string Admissibility::label() const {
  if (in_D_interior) return "D-interior";
  if (in_E_interior) return "E-interior";
  if (in_D_bar) return "D-bar";
  if (in_E) return "E";
  return "inadmissible";
}

Admissibility admissibility(const Path& path, const ChainSpec& spec, double tol) {
  Admissibility cls;
  const auto hull_pts = spec.jump_set.as_real();
  const int n = static_cast<int>(path.times.size());

  // E / E-interior: chords between every pair of knot times.
  cls.in_E = true;
  cls.in_E_interior = true;
  for (int i = 0; i < n && (cls.in_E || cls.in_E_interior); ++i) {
    for (int j = i + 1; j < n; ++j) {
      Vec chord = scale(sub(path.knots[j], path.knots[i]),
                        1.0 / (path.times[j] - path.times[i]));
      auto pos = classify_in_hull(hull_pts, chord, tol).position;
      if (pos == HullPosition::Outside) {
        cls.in_E = false;
        cls.in_E_interior = false;
        break;
      }
      if (pos != HullPosition::Interior) cls.in_E_interior = false;
    }
  }

  // D-bar: knots in the closed domain, segment velocities in the local
  // velocity polytope D_x (hull of jumps allowed at x). The constraint only
  // needs to hold a.e. in time, so each segment is sampled at interior times
  // just off the endpoints: a knot sitting exactly on the domain boundary
  // (measure zero in time) must not disqualify the segment.
  cls.in_D_bar = true;
  for (const auto& x : path.knots)
    if (!spec.domain.contains(x)) cls.in_D_bar = false;
  if (cls.in_D_bar) {
    for (int i = 0; i < path.segments() && cls.in_D_bar; ++i) {
      Vec v = path.velocity(i);
      std::vector<Vec> samples;
      for (double f : {1e-7, 0.5, 1.0 - 1e-7})
        samples.push_back(
            add(scale(path.knots[i], 1.0 - f), scale(path.knots[i + 1], f)));
      for (const Vec& x : samples) {
        auto allowed = allowed_jumps_limit(spec.domain, spec.jump_set, x);
        std::vector<Vec> local;
        for (int j : allowed) local.push_back(spec.jump_set.vec(j));
        if (local.empty() || !in_hull(local, v, tol)) {
          cls.in_D_bar = false;
          break;
        }
      }
    }
  }

  // D-interior: knots strictly inside, velocities anywhere in the full hull.
  cls.in_D_interior = true;
  for (const auto& x : path.knots)
    if (!spec.domain.strictly_inside(x)) cls.in_D_interior = false;
  if (cls.in_D_interior)
    for (int i = 0; i < path.segments(); ++i)
      if (!in_hull(hull_pts, path.velocity(i), tol)) cls.in_D_interior = false;

  return cls;
}

namespace {

double action_on_grid(const Path& path, const ChainSpec& spec, EvalMode mode,
                      Vec* segment_values) {
  double total = 0;
  if (segment_values) segment_values->assign(path.segments(), 0.0);
  for (int i = 0; i < path.segments(); ++i) {
    double dt = path.times[i + 1] - path.times[i];
    LegendrePoint lp;
    try {
      lp = legendre_transform(spec, mode, path.times[i], path.knots[i],
                              path.velocity(i));
    } catch (const NumericalError& e) {
      throw NumericalError("action: segment " + std::to_string(i) + ": " + e.what());
    }
    double contrib = dt * lp.value;
    if (segment_values) (*segment_values)[i] = contrib;
    total += contrib;
    if (total == kInf) break;
  }
  return total;
}

} // namespace

ActionValue action(const Path& path, const ChainSpec& spec, EvalMode mode,
                   const QuadratureOptions& opt) {
  ActionValue out;
  auto cls = admissibility(path, spec);
  if (!cls.admissible()) {
    out.value = kInf;
    return out;
  }
  Path current = path;
  out.value = action_on_grid(current, spec, mode, &out.segment_values);
  for (int b = 0; b < opt.max_bisections && std::isfinite(out.value); ++b) {
    current = current.bisected();
    Vec seg;
    double refined = action_on_grid(current, spec, mode, &seg);
    double change = std::abs(refined - out.value);
    out.value = refined;
    out.segment_values = std::move(seg);
    out.bisections = b + 1;
    if (change < opt.tol) break;
  }
  double dt2 = 0;
  for (int i = 0; i < current.segments(); ++i) {
    double dt = current.times[i + 1] - current.times[i];
    dt2 += dt * dt;
  }
  out.error_bound = (spec.rate_field.theta +
                     spec.rate_field.vartheta * spec.jump_set.diameter()) *
                    dt2 / 2.0;
  return out;
}

namespace {

// d/du L(s,u,lambda) by central differences; the envelope theorem gives
// d/du L*(s,u,vstar) = -d/du L(s,u,lambda*) at the dual maximizer.
Vec du_log_mgf(const ChainSpec& spec, EvalMode mode, double s, const Vec& u,
               const Vec& lambda, double step = 1e-6) {
  const int d = spec.dimension();
  Vec g(d, 0.0);
  for (int c = 0; c < d; ++c) {
    Vec up = u, um = u;
    up[c] += step;
    um[c] -= step;
    double lp = log_mgf(spec, mode, s, up, lambda);
    double lm = log_mgf(spec, mode, s, um, lambda);
    g[c] = (lp - lm) / (2 * step);
  }
  return g;
}

LegendrePoint segment_dual(const Path& path, const ChainSpec& spec, EvalMode mode,
                           int i) {
  auto lp = legendre_transform(spec, mode, path.times[i], path.knots[i],
                               path.velocity(i));
  if (lp.flag != BoundaryFlag::Interior)
    throw NumericalError(
        "action_gradient: segment " + std::to_string(i) +
        " velocity is not in the relative interior of the jump hull; restrict "
        "velocities to ri(conv(jumps))");
  return lp;
}

} // namespace

Mat action_gradient(const Path& path, const ChainSpec& spec, EvalMode mode) {
  const int nseg = path.segments();
  const int d = path.dimension();
  std::vector<LegendrePoint> duals(nseg);
  for (int i = 0; i < nseg; ++i) duals[i] = segment_dual(path, spec, mode, i);

  Mat grad = zeros(static_cast<std::size_t>(nseg - 1), static_cast<std::size_t>(d));
  for (int i = 1; i < nseg; ++i) {
    // knot i enters segment i-1 through its velocity and segment i through
    // both the base point and the velocity
    Vec g = duals[i - 1].dual;
    axpy(-1.0, duals[i].dual, g);
    double dt = path.times[i + 1] - path.times[i];
    Vec du = du_log_mgf(spec, mode, path.times[i], path.knots[i], duals[i].dual);
    axpy(-dt, du, g); // dL*/du = -dL/du
    grad[i - 1] = std::move(g);
  }
  return grad;
}

namespace {

struct KnotProblem {
  const ChainSpec* spec;
  EvalMode mode;
  Vec times;
  std::vector<Vec> knots;
  std::vector<bool> free_knot;
  // optional per-knot ball constraints
  bool has_balls = false;
  std::vector<Vec> ball_centers;
  double rho = 0;
};

bool feasible(const KnotProblem& p, const std::vector<Vec>& knots,
              const std::vector<Vec>& hull_pts, double shrink) {
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!p.spec->domain.contains(knots[i])) return false;
    if (p.has_balls && dist(knots[i], p.ball_centers[i]) > p.rho + 1e-12) return false;
  }
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    Vec v = scale(sub(knots[i + 1], knots[i]), 1.0 / (p.times[i + 1] - p.times[i]));
    if (!in_shrunk_hull(hull_pts, v, shrink, 1e-9)) return false;
  }
  return true;
}

double path_action(const KnotProblem& p, const std::vector<Vec>& knots) {
  Path path(p.times, knots);
  return action_on_grid(path, *p.spec, p.mode, nullptr);
}

Vec clip_to_ball(const Vec& x, const Vec& c, double rho) {
  double r = dist(x, c);
  if (r <= rho) return x;
  Vec out = c;
  axpy(rho / r, sub(x, c), out);
  return out;
}

MinimizeResult solve_knot_problem(KnotProblem p, const MinimizeOptions& opt) {
  MinimizeResult res;
  const auto hull_pts = p.spec->jump_set.as_real();
  auto knots = p.knots;

  auto project = [&](std::vector<Vec> cand) {
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (!p.free_knot[i]) {
        cand[i] = knots[i]; // pinned
        continue;
      }
      if (p.has_balls) cand[i] = clip_to_ball(cand[i], p.ball_centers[i], p.rho);
      if (!p.spec->domain.is_all())
        cand[i] = p.spec->domain.project_interior(cand[i], opt.domain_margin);
    }
    return cand;
  };

  if (!feasible(p, knots, hull_pts, 0.0)) {
    // the initial path may sit exactly on the hull boundary; nudge velocities
    // inward, keeping pinned knots fixed
    res.path = Path(p.times, knots);
    res.action.value = path_action(p, knots);
    res.converged = false;
    return res;
  }

  double current = path_action(p, knots);
  bool strictly_interior = feasible(p, knots, hull_pts, opt.shrink);
  int it = 0;
  double gnorm = kInf;
  for (; it < opt.max_iters; ++it) {
    if (!strictly_interior) break; // duals unbounded; keep the current iterate
    Mat grad;
    std::vector<int> free_idx;
    {
      // gradient with respect to every free knot: dual differences plus the
      // base-point term of the right segment, endpoint knots get one-sided terms
      Path path(p.times, knots);
      const int nseg = path.segments();
      std::vector<LegendrePoint> duals(nseg);
      bool boundary = false;
      for (int i = 0; i < nseg; ++i) {
        try {
          duals[i] = segment_dual(path, *p.spec, p.mode, i);
        } catch (const NumericalError&) {
          boundary = true;
          break;
        }
      }
      if (boundary) break;
      for (std::size_t i = 0; i < knots.size(); ++i) {
        if (!p.free_knot[i]) continue;
        Vec g(path.dimension(), 0.0);
        if (i >= 1) axpy(1.0, duals[i - 1].dual, g);
        if (i + 1 < knots.size()) {
          axpy(-1.0, duals[i].dual, g);
          double dt = p.times[i + 1] - p.times[i];
          Vec du = du_log_mgf(*p.spec, p.mode, p.times[i], knots[i], duals[i].dual);
          axpy(-dt, du, g);
        }
        grad.push_back(std::move(g));
        free_idx.push_back(static_cast<int>(i));
      }
    }
    gnorm = 0;
    for (const auto& g : grad) gnorm += dot(g, g);
    gnorm = std::sqrt(gnorm);
    if (gnorm <= opt.tol) break;

    double step = 1.0 / std::max(1.0, gnorm);
    bool improved = false;
    for (int bt = 0; bt < 40; ++bt) {
      auto cand = knots;
      for (std::size_t a = 0; a < free_idx.size(); ++a)
        axpy(-step, grad[a], cand[free_idx[a]]);
      cand = project(std::move(cand));
      if (feasible(p, cand, hull_pts, opt.shrink)) {
        double val;
        try {
          val = path_action(p, cand);
        } catch (const NumericalError&) {
          val = kInf; // ill-conditioned near a face: treat as rejected
        }
        if (val < current - 1e-14) {
          knots = std::move(cand);
          current = val;
          improved = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!improved) break;
  }

  res.path = Path(p.times, knots);
  res.iterations = it;
  res.grad_norm = std::isfinite(gnorm) ? gnorm : 0.0;
  res.converged = gnorm <= opt.tol || !strictly_interior;
  res.action = action(res.path, *p.spec, p.mode);
  if (p.has_balls) {
    for (std::size_t i = 0; i < knots.size(); ++i)
      if (dist(knots[i], p.ball_centers[i]) >= p.rho - 1e-7)
        res.constraint_active = true;
  }
  return res;
}

} // namespace

MinimizeResult minimize_action(const ChainSpec& spec, const Vec& start, const Vec& end,
                               int n_segments, EvalMode mode,
                               const MinimizeOptions& opt) {
  Vec chord = scale(sub(end, start), 1.0 / spec.horizon);
  if (!in_hull(spec.jump_set.as_real(), chord, 1e-9))
    throw ModelError("minimize_action: chord velocity outside the jump hull");
  Path straight = straight_path(start, end, spec.horizon, n_segments);

  KnotProblem p{&spec, mode, straight.times, straight.knots, {}, false, {}, 0};
  p.free_knot.assign(straight.knots.size(), true);
  p.free_knot.front() = false;
  p.free_knot.back() = false;
  auto res = solve_knot_problem(std::move(p), opt);

  // descent guarantee: never report worse than the straight line
  double straight_val = action(straight, spec, mode).value;
  if (res.action.value > straight_val) {
    res.path = straight;
    res.action = action(straight, spec, mode);
  }
  return res;
}

MinimizeResult ball_infimum(const ChainSpec& spec, const Path& center, double rho,
                            EvalMode mode, const MinimizeOptions& opt) {
  MinimizeResult res;
  if (dist(spec.phi0, center.at(0.0)) > rho + 1e-12) {
    res.action.value = kInf;
    res.path = center;
    return res;
  }

  // work on the center grid refined to a reasonable resolution; constraints
  // at knots then control the sup distance of the piecewise-linear pair
  Path grid_center = center;
  int min_segments = std::max(center.segments(), 8);
  Vec uniform;
  for (int i = 1; i < min_segments; ++i)
    uniform.push_back(center.horizon() * i / min_segments);
  grid_center = center.with_times(uniform);

  KnotProblem p{&spec, mode, grid_center.times, grid_center.knots, {}, true,
                grid_center.knots, rho};
  p.free_knot.assign(grid_center.knots.size(), true);
  p.free_knot.front() = false;

  // feasible initial path: start at phi0, chase the center with velocities
  // pulled into the shrunk hull
  const auto hull_pts = spec.jump_set.as_real();
  std::vector<Vec> init(grid_center.knots.size());
  init[0] = spec.phi0;
  for (std::size_t i = 1; i < init.size(); ++i) {
    double dt = p.times[i] - p.times[i - 1];
    Vec target = grid_center.knots[i];
    Vec v = scale(sub(target, init[i - 1]), 1.0 / dt);
    v = project_to_shrunk_hull(hull_pts, v, opt.shrink);
    init[i] = init[i - 1];
    axpy(dt, v, init[i]);
    init[i] = clip_to_ball(init[i], grid_center.knots[i], rho);
    if (!spec.domain.is_all())
      init[i] = spec.domain.project_interior(init[i], opt.domain_margin);
  }
  p.knots = std::move(init);
  if (!feasible(p, p.knots, hull_pts, 0.0)) {
    res.action.value = kInf;
    res.path = grid_center;
    return res;
  }
  return solve_knot_problem(std::move(p), opt);
}

} // namespace ldp
