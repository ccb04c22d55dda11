#pragma once

#include "ldp/linalg.hpp"

namespace ldp {

enum class HullPosition { Outside, RelBoundary, Interior };

struct HullClassification {
  HullPosition position = HullPosition::Outside;
  /// Indices of the points spanning the minimal face containing the query
  /// (all points for an interior query, empty when outside).
  std::vector<int> minimal_face;
};

/// Classifies a query point against conv(points): outside, on the relative
/// boundary, or in the relative interior. Feasibility is decided by a small
/// LP over convex-combination weights; the relative-interior test maximizes
/// the smallest weight.
HullClassification classify_in_hull(const std::vector<Vec>& points, const Vec& query,
                                    double tol = 1e-9);

bool in_hull(const std::vector<Vec>& points, const Vec& query, double tol = 1e-9);

double hull_diameter(const std::vector<Vec>& points);

Vec hull_centroid(const std::vector<Vec>& points);

/// Euclidean projection of a point onto conv(points), via projected gradient
/// over the weight simplex.
Vec project_to_hull(const std::vector<Vec>& points, const Vec& query,
                    int max_iters = 2000);

/// Projection onto the hull shrunk by factor (1-gamma) about its centroid.
Vec project_to_shrunk_hull(const std::vector<Vec>& points, const Vec& query,
                           double gamma);

bool in_shrunk_hull(const std::vector<Vec>& points, const Vec& query, double gamma,
                    double tol = 1e-9);

} // namespace ldp
