#pragma once

#include "ldp/linalg.hpp"

#include <stdexcept>
#include <string>

namespace ldp {

struct PathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Piecewise-linear path on [0,T]: strictly increasing times with one knot
/// per time, linear between knots.
struct Path {
  Vec times;
  std::vector<Vec> knots;

  Path() = default;
  Path(Vec t, std::vector<Vec> k);

  int dimension() const { return knots.empty() ? 0 : static_cast<int>(knots[0].size()); }
  int segments() const { return static_cast<int>(times.size()) - 1; }
  double horizon() const { return times.back(); }

  Vec at(double t) const;
  Vec velocity(int segment) const;

  /// Same path with a knot inserted on each segment midpoint.
  Path bisected() const;
  /// Same path re-knotted at the union of its own times and extra ones.
  Path with_times(const Vec& extra_times) const;
};

Path straight_path(const Vec& from, const Vec& to, double horizon, int n_segments);
Path constant_path(const Vec& at, double horizon, int n_segments = 1);

/// Exact sup-norm distance between two piecewise-linear paths on the same
/// horizon, evaluated at the union of both breakpoint sets.
double sup_distance(const Path& a, const Path& b);

/// Max over the union of breakpoints of ||a(t) - b(t)||_inf per coordinate
/// (the tube metric used for ball membership).
double sup_distance_inf(const Path& a, const Path& b);

Path read_path_csv(const std::string& file);
Path parse_path_csv(const std::string& text);
void write_path_csv(const std::string& file, const Path& path,
                    const std::vector<std::string>& comment_lines = {});
std::string format_path_csv(const Path& path,
                            const std::vector<std::string>& comment_lines = {});

} // namespace ldp
