#include "ldp/lp.hpp"

#include <cassert>
#include <cstddef>

namespace ldp {
namespace {

// Tableau rows 0..m-1 are constraints, row m is the objective in the form
// z - c.x = 0, i.e. tab[m][j] holds the reduced cost of column j (negated c
// initially) and tab[m][ncols-1] holds the current objective value.
struct Tableau {
  Mat tab;
  std::vector<int> basis;
  std::size_t m, ncols;

  void pivot(std::size_t row, std::size_t col) {
    double p = tab[row][col];
    for (auto& v : tab[row]) v /= p;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == row) continue;
      double f = tab[r][col];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < ncols; ++c) tab[r][c] -= f * tab[row][c];
    }
    basis[row] = static_cast<int>(col);
  }

  // Bland's rule; returns false when optimal, sets unbounded on failure of
  // the ratio test. Columns with allow[j]==false are never entered.
  bool step(const std::vector<char>& allow, bool& unbounded, double tol) {
    std::size_t enter = ncols;
    for (std::size_t j = 0; j + 1 < ncols; ++j) {
      if (!allow[j]) continue;
      if (tab[m][j] < -tol) { enter = j; break; }
    }
    if (enter == ncols) return false;
    std::size_t leave = m;
    double best = kInf;
    for (std::size_t r = 0; r < m; ++r) {
      if (tab[r][enter] > tol) {
        double ratio = tab[r][ncols - 1] / tab[r][enter];
        if (ratio < best - 1e-15 ||
            (ratio < best + 1e-15 && (leave == m || basis[r] < basis[leave]))) {
          best = ratio;
          leave = r;
        }
      }
    }
    if (leave == m) { unbounded = true; return false; }
    pivot(leave, enter);
    return true;
  }
};

} // namespace

LpResult lp_max(const Mat& a, const Vec& b, const Vec& c, double tol) {
  const std::size_t m = a.size();
  const std::size_t n = m ? a[0].size() : c.size();
  assert(c.size() == n && b.size() == m);

  Tableau t;
  t.m = m;
  t.ncols = n + m + 1; // original vars + artificials + rhs
  t.tab = zeros(m + 1, t.ncols);
  t.basis.assign(m, 0);
  for (std::size_t r = 0; r < m; ++r) {
    double sgn = b[r] < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t.tab[r][j] = sgn * a[r][j];
    t.tab[r][n + r] = 1.0;
    t.tab[r][t.ncols - 1] = sgn * b[r];
    t.basis[r] = static_cast<int>(n + r);
  }

  // Phase 1: maximize -sum(artificials). Reduced-cost row starts at +1 on
  // artificial columns; canonicalize against the artificial basis.
  for (std::size_t j = 0; j < m; ++j) t.tab[m][n + j] = 1.0;
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t cidx = 0; cidx < t.ncols; ++cidx)
      t.tab[m][cidx] -= t.tab[r][cidx];

  std::vector<char> allow(t.ncols - 1, 1);
  bool unbounded = false;
  while (t.step(allow, unbounded, tol)) {}

  LpResult res;
  if (t.tab[m][t.ncols - 1] < -tol * 10) return res; // infeasible

  // Drive remaining artificials out of the basis where possible.
  for (std::size_t r = 0; r < m; ++r) {
    if (t.basis[r] < static_cast<int>(n)) continue;
    std::size_t col = n;
    for (std::size_t j = 0; j < n; ++j)
      if (std::fabs(t.tab[r][j]) > tol) { col = j; break; }
    if (col < n) t.pivot(r, col);
    // else: redundant row, artificial stays basic at zero
  }

  // Phase 2: restore the real objective.
  for (std::size_t j = 0; j < t.ncols; ++j) t.tab[m][j] = 0.0;
  for (std::size_t j = 0; j < n; ++j) t.tab[m][j] = -c[j];
  for (std::size_t r = 0; r < m; ++r) {
    int bj = t.basis[r];
    if (bj < static_cast<int>(n) && c[bj] != 0.0)
      for (std::size_t cidx = 0; cidx < t.ncols; ++cidx)
        t.tab[m][cidx] += c[bj] * t.tab[r][cidx];
  }
  for (std::size_t j = n; j + 1 < t.ncols; ++j) allow[j] = 0;
  unbounded = false;
  while (t.step(allow, unbounded, tol)) {}

  res.feasible = true;
  res.bounded = !unbounded;
  res.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (t.basis[r] < static_cast<int>(n))
      res.x[t.basis[r]] = t.tab[r][t.ncols - 1];
  res.value = res.bounded ? dot(res.x, c) : kInf;
  return res;
}

} // namespace ldp
