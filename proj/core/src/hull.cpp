#include "ldp/hull.hpp"

#include "ldp/lp.hpp"

#include <algorithm>
#include <cassert>

namespace ldp {
namespace {

// Equality constraints for convex-combination weights mu:
//   sum_j mu_j p_j = query,  sum_j mu_j = 1.
void combination_constraints(const std::vector<Vec>& points, const Vec& query,
                             Mat& a, Vec& b) {
  const std::size_t d = query.size(), m = points.size();
  a = zeros(d + 1, m);
  b.assign(d + 1, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < m; ++j) a[i][j] = points[j][i];
    b[i] = query[i];
  }
  for (std::size_t j = 0; j < m; ++j) a[d][j] = 1.0;
  b[d] = 1.0;
}

} // namespace

HullClassification classify_in_hull(const std::vector<Vec>& points, const Vec& query,
                                    double tol) {
  HullClassification out;
  const std::size_t m = points.size(), d = query.size();
  Mat a;
  Vec b;
  combination_constraints(points, query, a, b);

  LpResult feas = lp_max(a, b, Vec(m, 0.0), tol);
  if (!feas.feasible) return out;

  // Maximize t subject to mu_j >= t for all j: variables (mu, t, slacks).
  // A full-support representation exists iff the optimum is positive, which
  // characterizes the relative interior of a polytope given as a point hull.
  {
    const std::size_t nv = m + 1 + m;
    Mat a2 = zeros(d + 1 + m, nv);
    Vec b2(d + 1 + m, 0.0), c2(nv, 0.0);
    for (std::size_t i = 0; i <= d; ++i) {
      for (std::size_t j = 0; j < m; ++j) a2[i][j] = a[i][j];
      b2[i] = b[i];
    }
    for (std::size_t j = 0; j < m; ++j) {
      a2[d + 1 + j][j] = 1.0;
      a2[d + 1 + j][m] = -1.0;
      a2[d + 1 + j][m + 1 + j] = -1.0;
    }
    c2[m] = 1.0;
    LpResult ri = lp_max(a2, b2, c2, tol);
    if (ri.feasible && ri.bounded && ri.value > tol) {
      out.position = HullPosition::Interior;
      out.minimal_face.resize(m);
      for (std::size_t j = 0; j < m; ++j) out.minimal_face[j] = static_cast<int>(j);
      return out;
    }
  }

  // Relative boundary: the minimal face consists of the points that can
  // carry positive weight in some feasible representation.
  out.position = HullPosition::RelBoundary;
  for (std::size_t j = 0; j < m; ++j) {
    Vec c(m, 0.0);
    c[j] = 1.0;
    LpResult r = lp_max(a, b, c, tol);
    if (r.feasible && r.value > tol) out.minimal_face.push_back(static_cast<int>(j));
  }
  return out;
}

bool in_hull(const std::vector<Vec>& points, const Vec& query, double tol) {
  Mat a;
  Vec b;
  combination_constraints(points, query, a, b);
  return lp_max(a, b, Vec(points.size(), 0.0), tol).feasible;
}

double hull_diameter(const std::vector<Vec>& points) {
  double best = 0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      best = std::max(best, dist(points[i], points[j]));
  return best;
}

Vec hull_centroid(const std::vector<Vec>& points) {
  assert(!points.empty());
  Vec c(points[0].size(), 0.0);
  for (const auto& p : points) axpy(1.0, p, c);
  return scale(c, 1.0 / static_cast<double>(points.size()));
}

namespace {

// Euclidean projection of w onto the probability simplex (Held et al.).
void project_simplex(Vec& w) {
  Vec u = w;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0, theta = 0;
  int k = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0) {
      k = static_cast<int>(i + 1);
      theta = t;
    }
  }
  (void)k;
  for (auto& v : w) v = std::max(0.0, v - theta);
}

} // namespace

Vec project_to_hull(const std::vector<Vec>& points, const Vec& query, int max_iters) {
  const std::size_t m = points.size();
  Vec mu(m, 1.0 / static_cast<double>(m));
  // Lipschitz bound for the gradient of ||P mu - q||^2 over the simplex.
  double lip = 0;
  for (const auto& p : points) lip += dot(p, p);
  lip = std::max(lip * 2, 1e-12);
  Vec x(query.size(), 0.0);
  for (int it = 0; it < max_iters; ++it) {
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t j = 0; j < m; ++j) axpy(mu[j], points[j], x);
    Vec r = sub(x, query);
    if (norm(r) < 1e-14) break;
    Vec g(m);
    for (std::size_t j = 0; j < m; ++j) g[j] = 2.0 * dot(points[j], r);
    double gn = 0;
    for (auto v : g) gn += v * v;
    if (gn < 1e-28) break;
    for (std::size_t j = 0; j < m; ++j) mu[j] -= g[j] / lip;
    project_simplex(mu);
  }
  std::fill(x.begin(), x.end(), 0.0);
  for (std::size_t j = 0; j < m; ++j) axpy(mu[j], points[j], x);
  return x;
}

Vec project_to_shrunk_hull(const std::vector<Vec>& points, const Vec& query,
                           double gamma) {
  Vec c = hull_centroid(points);
  // Map query into the unshrunk frame, project, map back.
  Vec q = add(c, scale(sub(query, c), 1.0 / (1.0 - gamma)));
  Vec p = project_to_hull(points, q);
  return add(c, scale(sub(p, c), 1.0 - gamma));
}

bool in_shrunk_hull(const std::vector<Vec>& points, const Vec& query, double gamma,
                    double tol) {
  Vec c = hull_centroid(points);
  Vec q = add(c, scale(sub(query, c), 1.0 / (1.0 - gamma)));
  return in_hull(points, q, tol);
}

} // namespace ldp
