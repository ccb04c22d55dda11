#pragma once

#include "ldp/legendre.hpp"
#include "ldp/path.hpp"

namespace ldp {

/// Admissibility classes of a piecewise-linear path. A path can belong to
/// several classes at once; `label` reports the finest one.
struct Admissibility {
  bool in_E = false;           // all chords in conv(jumps)
  bool in_E_interior = false;  // all chords in ri(conv(jumps))
  bool in_D_bar = false;       // knots in the domain, velocities in D_{phi(t)}
  bool in_D_interior = false;  // knots in int(domain), velocities in conv(jumps)

  bool admissible() const { return in_E || in_D_bar; }
  std::string label() const;
};

Admissibility admissibility(const Path& path, const ChainSpec& spec, double tol = 1e-9);

struct ActionValue {
  double value = 0;
  std::string scheme = "left-endpoint";
  Vec segment_values;      // per-segment contribution (already times dt)
  double error_bound = 0;  // a-priori quadrature bound from the declared constants
  int bisections = 0;
};

struct QuadratureOptions {
  int max_bisections = 0;  // 0 = evaluate on the path's own grid only
  double tol = 1e-8;       // stop refining when successive values differ by less
};

/// Rate functional: left-endpoint Riemann sum of L*(t_i, phi(t_i), velocity_i)
/// over the path grid, optionally refined by uniform bisection.
ActionValue action(const Path& path, const ChainSpec& spec, EvalMode mode,
                   const QuadratureOptions& opt = {});

/// Analytic gradient of the action with respect to the interior knots
/// (knots 1..n-1), one row per knot. Requires velocities in the relative
/// interior of the jump hull.
Mat action_gradient(const Path& path, const ChainSpec& spec, EvalMode mode);

struct MinimizeOptions {
  int max_iters = 500;
  double tol = 1e-6;       // projected-gradient norm target
  double shrink = 1e-6;    // hull shrink factor keeping duals bounded
  double domain_margin = 1e-9;
};

struct MinimizeResult {
  Path path{{0, 1}, {{0}, {0}}};
  ActionValue action;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0;
  bool constraint_active = false;  // ball_infimum only
};

/// Projected gradient descent over interior knots between fixed endpoints.
MinimizeResult minimize_action(const ChainSpec& spec, const Vec& start, const Vec& end,
                               int n_segments, EvalMode mode = EvalMode::Limit,
                               const MinimizeOptions& opt = {});

/// Infimum of the action over paths within sup-norm distance rho of the
/// center at all grid times, with the start pinned to phi0 and the endpoint
/// free inside the tube. Returns +inf if the pinning is incompatible.
MinimizeResult ball_infimum(const ChainSpec& spec, const Path& center, double rho,
                            EvalMode mode = EvalMode::Limit,
                            const MinimizeOptions& opt = {});

} // namespace ldp
