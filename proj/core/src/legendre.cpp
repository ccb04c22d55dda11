#include "ldp/legendre.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <functional>

namespace ldp {

std::vector<int> LocalLaw::support() const {
  std::vector<int> s;
  for (std::size_t j = 0; j < logw.size(); ++j)
    if (logw[j] > -kInf) s.push_back(static_cast<int>(j));
  return s;
}

LocalLaw local_law(const ChainSpec& spec, EvalMode mode, double s, const Vec& u) {
  LocalLaw law;
  law.logw.assign(spec.jump_set.size(), -kInf);
  if (!spec.domain.contains(u)) return law; // L = -inf off the domain
  for (std::size_t j = 0; j < spec.jump_set.size(); ++j)
    law.logw[j] = spec.log_weight(s, u, static_cast<int>(j), mode);
  return law;
}

double log_mgf(const JumpSet& jumps, const LocalLaw& law, const Vec& v) {
  double mx = -kInf;
  for (std::size_t j = 0; j < law.logw.size(); ++j) {
    if (law.logw[j] == -kInf) continue;
    mx = std::max(mx, dot(v, jumps.vec(static_cast<int>(j))) + law.logw[j]);
  }
  if (mx == -kInf) return -kInf;
  double sum = 0;
  for (std::size_t j = 0; j < law.logw.size(); ++j) {
    if (law.logw[j] == -kInf) continue;
    sum += std::exp(dot(v, jumps.vec(static_cast<int>(j))) + law.logw[j] - mx);
  }
  return mx + std::log(sum);
}

double log_mgf(const ChainSpec& spec, EvalMode mode, double s, const Vec& u,
               const Vec& v) {
  return log_mgf(spec.jump_set, local_law(spec, mode, s, u), v);
}

TiltedMeasure tilted_measure(const JumpSet& jumps, const LocalLaw& law, const Vec& v) {
  TiltedMeasure tm;
  tm.tilt = v;
  tm.prob.assign(law.logw.size(), 0.0);
  double mx = -kInf;
  for (std::size_t j = 0; j < law.logw.size(); ++j)
    if (law.logw[j] > -kInf)
      mx = std::max(mx, dot(v, jumps.vec(static_cast<int>(j))) + law.logw[j]);
  if (mx == -kInf) throw NumericalError("tilted_measure: empty support");
  double z = 0;
  for (std::size_t j = 0; j < law.logw.size(); ++j) {
    if (law.logw[j] == -kInf) continue;
    tm.prob[j] = std::exp(dot(v, jumps.vec(static_cast<int>(j))) + law.logw[j] - mx);
    z += tm.prob[j];
  }
  for (auto& p : tm.prob) p /= z;
  return tm;
}

TiltedMeasure tilted_measure(const ChainSpec& spec, EvalMode mode, double s,
                             const Vec& u, const Vec& v) {
  auto tm = tilted_measure(spec.jump_set, local_law(spec, mode, s, u), v);
  tm.s = s;
  tm.u = u;
  return tm;
}

Vec mgf_grad(const JumpSet& jumps, const LocalLaw& law, const Vec& v) {
  auto tm = tilted_measure(jumps, law, v);
  Vec mean(jumps.dimension, 0.0);
  for (std::size_t j = 0; j < tm.prob.size(); ++j)
    if (tm.prob[j] > 0) axpy(tm.prob[j], jumps.vec(static_cast<int>(j)), mean);
  return mean;
}

Vec mgf_grad(const ChainSpec& spec, EvalMode mode, double s, const Vec& u,
             const Vec& v) {
  return mgf_grad(spec.jump_set, local_law(spec, mode, s, u), v);
}

Mat mgf_hess(const JumpSet& jumps, const LocalLaw& law, const Vec& v) {
  auto tm = tilted_measure(jumps, law, v);
  const int d = jumps.dimension;
  Vec mean(d, 0.0);
  for (std::size_t j = 0; j < tm.prob.size(); ++j)
    if (tm.prob[j] > 0) axpy(tm.prob[j], jumps.vec(static_cast<int>(j)), mean);
  Mat cov = zeros(d, d);
  for (std::size_t j = 0; j < tm.prob.size(); ++j) {
    if (tm.prob[j] <= 0) continue;
    Vec c = sub(jumps.vec(static_cast<int>(j)), mean);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) cov[a][b] += tm.prob[j] * c[a] * c[b];
  }
  return cov;
}

Mat mgf_hess(const ChainSpec& spec, EvalMode mode, double s, const Vec& u,
             const Vec& v) {
  return mgf_hess(spec.jump_set, local_law(spec, mode, s, u), v);
}

namespace {

// Restriction of the conjugate problem to a subset F of the support:
//   sup_v {(v,vstar) - log sum_{j in F} exp((v,delta_j) + logw_j)}
// solved by damped Newton over the span of the centered face directions.
LegendrePoint face_newton(const JumpSet& jumps, const LocalLaw& law,
                          const std::vector<int>& face, const Vec& vstar,
                          const LegendreOptions& opt) {
  LegendrePoint out;
  const int d = jumps.dimension;

  if (face.size() == 1) {
    out.value = -law.logw[face[0]];
    out.dual.assign(d, 0.0);
    out.grad_residual = 0;
    return out;
  }

  std::vector<Vec> pts;
  for (int j : face) pts.push_back(jumps.vec(j));
  Vec base = pts[0];
  std::vector<Vec> dirs;
  for (std::size_t i = 1; i < pts.size(); ++i) dirs.push_back(sub(pts[i], base));
  Mat basis = orthonormal_basis(dirs); // k x d
  const int k = static_cast<int>(basis.size());

  auto lift = [&](const Vec& y) {
    Vec v(d, 0.0);
    for (int i = 0; i < k; ++i) axpy(y[i], basis[i], v);
    return v;
  };
  auto face_logsum = [&](const Vec& v) {
    double mx = -kInf;
    for (int j : face) mx = std::max(mx, dot(v, jumps.vec(j)) + law.logw[j]);
    double sum = 0;
    for (int j : face) sum += std::exp(dot(v, jumps.vec(j)) + law.logw[j] - mx);
    return mx + std::log(sum);
  };
  auto face_mean = [&](const Vec& v) {
    double mx = -kInf;
    for (int j : face) mx = std::max(mx, dot(v, jumps.vec(j)) + law.logw[j]);
    double z = 0;
    Vec mean(d, 0.0);
    for (int j : face) {
      double p = std::exp(dot(v, jumps.vec(j)) + law.logw[j] - mx);
      z += p;
      axpy(p, jumps.vec(j), mean);
    }
    return scale(mean, 1.0 / z);
  };

  Vec y(k, 0.0);
  double objective = -face_logsum(lift(y)); // (v,vstar) = 0 at y = 0
  int it = 0;
  for (; it < opt.max_iters; ++it) {
    Vec v = lift(y);
    Vec mean = face_mean(v);
    Vec g(k);
    Vec resid = sub(vstar, mean);
    for (int i = 0; i < k; ++i) g[i] = dot(basis[i], resid);
    if (norm(g) <= opt.tol) break;

    // Projected covariance Hessian, with a floor for near-singular faces.
    Mat cov = zeros(d, d);
    {
      double mx = -kInf;
      for (int j : face) mx = std::max(mx, dot(v, jumps.vec(j)) + law.logw[j]);
      double z = 0;
      std::vector<double> p(face.size());
      for (std::size_t a = 0; a < face.size(); ++a) {
        p[a] = std::exp(dot(v, jumps.vec(face[a])) + law.logw[face[a]] - mx);
        z += p[a];
      }
      for (std::size_t a = 0; a < face.size(); ++a) {
        Vec c = sub(jumps.vec(face[a]), mean);
        for (int i = 0; i < d; ++i)
          for (int jj = 0; jj < d; ++jj) cov[i][jj] += (p[a] / z) * c[i] * c[jj];
      }
    }
    Mat h = zeros(k, k);
    for (int i = 0; i < k; ++i) {
      Vec ci = matvec(cov, basis[i]);
      for (int jj = 0; jj < k; ++jj) h[i][jj] = dot(basis[jj], ci);
      h[i][i] += 1e-14;
    }
    Vec dy;
    if (!solve_linear(h, g, dy)) dy = g; // fall back to steepest ascent

    double step = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 60; ++bt) {
      Vec ytry = y;
      axpy(step, dy, ytry);
      Vec vtry = lift(ytry);
      double obj = dot(vtry, vstar) - face_logsum(vtry);
      if (obj > objective + 1e-18) {
        y = ytry;
        objective = obj;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break; // stationary to machine precision
  }

  Vec v = lift(y);
  Vec mean = face_mean(v);
  out.value = dot(v, vstar) - face_logsum(v);
  out.dual = v;
  out.iterations = it;
  {
    Vec resid = sub(vstar, mean);
    Vec g(k);
    for (int i = 0; i < k; ++i) g[i] = dot(basis[i], resid);
    out.grad_residual = norm(g);
  }
  // A stall at machine precision with a small residual is acceptable: the
  // objective value is already converged even when the near-singular Hessian
  // close to a face prevents the gradient from shrinking further.
  if (out.grad_residual > 1e-6 * (1.0 + norm(vstar))) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", out.grad_residual);
    throw NumericalError(std::string("legendre_transform: Newton did not converge, "
                                     "residual ") +
                         buf);
  }
  return out;
}

} // namespace

LegendrePoint legendre_transform(const JumpSet& jumps, const LocalLaw& law,
                                 const Vec& vstar, const LegendreOptions& opt) {
  LegendrePoint out;
  auto supp = law.support();
  if (supp.empty()) {
    out.value = kInf;
    out.flag = BoundaryFlag::OutsideDomain;
    return out;
  }
  std::vector<Vec> pts;
  for (int j : supp) pts.push_back(jumps.vec(j));
  auto cls = classify_in_hull(pts, vstar, opt.boundary_tol);
  if (cls.position == HullPosition::Outside) {
    out.value = kInf;
    out.flag = BoundaryFlag::OutsideDomain;
    out.dual.assign(jumps.dimension, 0.0);
    return out;
  }
  std::vector<int> face;
  if (cls.position == HullPosition::Interior) {
    face = supp;
  } else {
    for (int idx : cls.minimal_face) face.push_back(supp[idx]);
  }
  out = face_newton(jumps, law, face, vstar, opt);
  out.flag = cls.position == HullPosition::Interior ? BoundaryFlag::Interior
                                                    : BoundaryFlag::RelBoundary;
  if (out.value < 0 && out.value > -1e-9) out.value = 0.0;
  return out;
}

LegendrePoint legendre_transform(const ChainSpec& spec, EvalMode mode, double s,
                                 const Vec& u, const Vec& vstar,
                                 const LegendreOptions& opt) {
  return legendre_transform(spec.jump_set, local_law(spec, mode, s, u), vstar, opt);
}

GridOracleResult legendre_oracle_grid(const ChainSpec& spec, EvalMode mode, double s,
                                      const Vec& u, const Vec& vstar, const Vec& box_lo,
                                      const Vec& box_hi, int points_per_dim) {
  GridOracleResult res;
  const int d = spec.dimension();
  LocalLaw law = local_law(spec, mode, s, u);
  if (law.support().empty()) return res;
  std::vector<int> idx(d, 0);
  Vec v(d);
  for (;;) {
    bool on_boundary = false;
    for (int i = 0; i < d; ++i) {
      double t = points_per_dim == 1
                     ? 0.5
                     : static_cast<double>(idx[i]) / (points_per_dim - 1);
      v[i] = box_lo[i] + t * (box_hi[i] - box_lo[i]);
      if (idx[i] == 0 || idx[i] == points_per_dim - 1) on_boundary = true;
    }
    double val = dot(v, vstar) - log_mgf(spec.jump_set, law, v);
    if (val > res.value) {
      res.value = val;
      res.max_on_box_boundary = on_boundary;
    }
    int k = 0;
    while (k < d && ++idx[k] == points_per_dim) idx[k++] = 0;
    if (k == d) break;
  }
  return res;
}

double entropy_rate(const ChainSpec& spec, EvalMode mode, double s, const Vec& u,
                    const Vec& vstar, int grid_n, double band) {
  LocalLaw law = local_law(spec, mode, s, u);
  auto supp = law.support();
  if (supp.empty()) return kInf;
  const int m = static_cast<int>(supp.size());
  const int d = spec.dimension();
  const double n = static_cast<double>(grid_n);

  // I(mu) = sum mu log(mu) - sum mu logw (the normalizer of nu0 cancels
  // against the -log sum exp(f) term of the representation).
  double best = kInf;
  std::vector<int> counts(m, 0);
  long long combos = 1;
  for (int i = 0; i < m - 1; ++i) {
    combos *= (grid_n + i + 1);
    if (combos > 40'000'000) throw NumericalError("entropy_rate: simplex grid too large");
  }
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == m - 1) {
      counts[pos] = left;
      Vec mean(d, 0.0);
      double entropy = 0;
      for (int i = 0; i < m; ++i) {
        if (counts[i] == 0) continue;
        double mu = counts[i] / n;
        axpy(mu, spec.jump_set.vec(supp[i]), mean);
        entropy += mu * (std::log(mu) - law.logw[supp[i]]);
      }
      if (dist(mean, vstar) <= band) best = std::min(best, entropy);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[pos] = c;
      rec(pos + 1, left - c);
    }
  };
  rec(0, grid_n);
  return best;
}

RegGrid make_reg_grid(const ChainSpec& spec, EvalMode mode, double s, const Vec& u,
                      double r, double grid_step) {
  RegGrid grid;
  const int d = spec.dimension();
  const int half = std::max(1, static_cast<int>(std::round(r / grid_step)));
  for (int i = -half; i <= half; ++i) {
    double sv = s + i * grid_step;
    if (sv < 0) continue;
    grid.s_values.push_back(sv);
  }
  if (grid.s_values.empty()) grid.s_values.push_back(0.0);
  std::vector<int> idx(d, 0);
  Vec x(d);
  for (;;) {
    double dist2 = 0;
    for (int i = 0; i < d; ++i) {
      x[i] = u[i] + (idx[i] - half) * grid_step;
      dist2 += (x[i] - u[i]) * (x[i] - u[i]);
    }
    if (dist2 <= r * r + 1e-15) grid.u_values.push_back(x);
    int k = 0;
    while (k < d && ++idx[k] == 2 * half + 1) idx[k++] = 0;
    if (k == d) break;
  }
  grid.laws.reserve(grid.s_values.size() * grid.u_values.size());
  for (double sv : grid.s_values)
    for (const auto& uv : grid.u_values)
      grid.laws.push_back(local_law(spec, mode, sv, uv));
  return grid;
}

double reg_lagrangian(const JumpSet& jumps, const RegGrid& grid, const Vec& v) {
  double sup = -kInf;
  for (const auto& law : grid.laws) sup = std::max(sup, log_mgf(jumps, law, v));
  return sup;
}

double reg_lagrangian(const ChainSpec& spec, EvalMode mode, double s, const Vec& u,
                      const Vec& v, double r, double grid_step) {
  RegGrid grid = make_reg_grid(spec, mode, s, u, r, grid_step);
  return reg_lagrangian(spec.jump_set, grid, v);
}

double reg_legendre(const ChainSpec& spec, EvalMode mode, double s, const Vec& u,
                    const Vec& vstar, double r, double grid_step) {
  RegGrid grid = make_reg_grid(spec, mode, s, u, r, grid_step);
  double inf = kInf;
  for (const auto& law : grid.laws) {
    try {
      inf = std::min(inf, legendre_transform(spec.jump_set, law, vstar).value);
    } catch (const NumericalError&) {
      // a non-converged point cannot lower a minimum we trust; skip it
    }
  }
  return inf;
}

double legendre_of_reg(const ChainSpec& spec, EvalMode mode, double s, const Vec& u,
                       const Vec& vstar, double r, double grid_step,
                       double v_halfwidth, int coarse_points, int refinements) {
  RegGrid grid = make_reg_grid(spec, mode, s, u, r, grid_step);
  const int d = spec.dimension();
  Vec center(d, 0.0);
  double width = v_halfwidth;
  double best = -kInf;
  for (int round = 0; round <= refinements; ++round) {
    Vec best_v = center;
    std::vector<int> idx(d, 0);
    Vec v(d);
    for (;;) {
      for (int i = 0; i < d; ++i)
        v[i] = center[i] - width +
               2 * width * static_cast<double>(idx[i]) / (coarse_points - 1);
      double val = dot(v, vstar) - reg_lagrangian(spec.jump_set, grid, v);
      if (val > best) {
        best = val;
        best_v = v;
      }
      int k = 0;
      while (k < d && ++idx[k] == coarse_points) idx[k++] = 0;
      if (k == d) break;
    }
    center = best_v;
    width = 4.0 * width / (coarse_points - 1); // keep two cells of margin
  }
  return best;
}

Vec envelope_lagrangian(const ChainSpec& spec, EvalMode mode, double s, const Vec& u,
                        const Vec& vstar, const Vec& r_sequence, double grid_step) {
  Vec values;
  values.reserve(r_sequence.size());
  for (double r : r_sequence)
    values.push_back(reg_legendre(spec, mode, s, u, vstar, r, grid_step));
  return values;
}

} // namespace ldp
