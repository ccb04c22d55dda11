#pragma once

#include "ldp/linalg.hpp"

namespace ldp {

struct LpResult {
  bool feasible = false;
  bool bounded = true;
  double value = 0.0;
  Vec x;
};

/// Maximize c.x subject to A x = b, x >= 0.
/// Dense two-phase simplex with Bland's rule. Sized for the small
/// problems arising from jump-set geometry (tens of rows/columns).
LpResult lp_max(const Mat& a, const Vec& b, const Vec& c, double tol = 1e-9);

} // namespace ldp
