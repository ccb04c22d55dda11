#include "ldp/path.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ldp {

Path::Path(Vec t, std::vector<Vec> k) : times(std::move(t)), knots(std::move(k)) {
  if (times.size() < 2) throw PathError("path needs at least two knots");
  if (times.size() != knots.size()) throw PathError("times/knots size mismatch");
  if (times.front() != 0.0) throw PathError("path must start at t=0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw PathError("path times must strictly increase");
  for (const auto& x : knots)
    if (x.size() != knots[0].size()) throw PathError("inconsistent knot dimensions");
}

Vec Path::at(double t) const {
  if (t <= times.front()) return knots.front();
  if (t >= times.back()) return knots.back();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t i = static_cast<std::size_t>(it - times.begin());
  double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  Vec x = knots[i - 1];
  for (std::size_t c = 0; c < x.size(); ++c)
    x[c] += w * (knots[i][c] - knots[i - 1][c]);
  return x;
}

Vec Path::velocity(int segment) const {
  Vec v = sub(knots[segment + 1], knots[segment]);
  return scale(v, 1.0 / (times[segment + 1] - times[segment]));
}

Path Path::bisected() const {
  Vec t;
  std::vector<Vec> k;
  for (int i = 0; i < segments(); ++i) {
    t.push_back(times[i]);
    k.push_back(knots[i]);
    double mid = 0.5 * (times[i] + times[i + 1]);
    t.push_back(mid);
    k.push_back(at(mid));
  }
  t.push_back(times.back());
  k.push_back(knots.back());
  return Path(std::move(t), std::move(k));
}

Path Path::with_times(const Vec& extra_times) const {
  Vec t = times;
  for (double e : extra_times)
    if (e > times.front() && e < times.back()) t.push_back(e);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end(),
                      [](double a, double b) { return std::abs(a - b) < 1e-15; }),
          t.end());
  std::vector<Vec> k;
  k.reserve(t.size());
  for (double tt : t) k.push_back(at(tt));
  return Path(std::move(t), std::move(k));
}

Path straight_path(const Vec& from, const Vec& to, double horizon, int n_segments) {
  if (n_segments < 1) throw PathError("need at least one segment");
  Vec t;
  std::vector<Vec> k;
  for (int i = 0; i <= n_segments; ++i) {
    double w = static_cast<double>(i) / n_segments;
    t.push_back(w * horizon);
    Vec x = from;
    for (std::size_t c = 0; c < x.size(); ++c) x[c] += w * (to[c] - from[c]);
    k.push_back(std::move(x));
  }
  return Path(std::move(t), std::move(k));
}

Path constant_path(const Vec& at, double horizon, int n_segments) {
  return straight_path(at, at, horizon, n_segments);
}

namespace {

Vec merged_times(const Path& a, const Path& b) {
  Vec t = a.times;
  t.insert(t.end(), b.times.begin(), b.times.end());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

} // namespace

double sup_distance(const Path& a, const Path& b) {
  double sup = 0;
  for (double t : merged_times(a, b)) sup = std::max(sup, dist(a.at(t), b.at(t)));
  return sup;
}

double sup_distance_inf(const Path& a, const Path& b) {
  double sup = 0;
  for (double t : merged_times(a, b)) {
    Vec xa = a.at(t), xb = b.at(t);
    for (std::size_t c = 0; c < xa.size(); ++c)
      sup = std::max(sup, std::abs(xa[c] - xb[c]));
  }
  return sup;
}

Path parse_path_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Vec times;
  std::vector<Vec> knots;
  bool header_seen = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line.rfind("t,", 0) != 0 && line != "t")
        throw PathError("path CSV missing t,x1,... header");
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    Vec values;
    while (std::getline(row, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw PathError("bad number in path CSV line " + std::to_string(lineno));
      }
    }
    if (values.empty()) throw PathError("empty path CSV row");
    times.push_back(values[0]);
    knots.emplace_back(values.begin() + 1, values.end());
  }
  if (times.size() < 2) throw PathError("path CSV needs at least two rows");
  return Path(std::move(times), std::move(knots));
}

Path read_path_csv(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw PathError("cannot open path file: " + file);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_path_csv(ss.str());
}

std::string format_path_csv(const Path& path,
                            const std::vector<std::string>& comment_lines) {
  std::ostringstream out;
  for (const auto& c : comment_lines) out << "# " << c << "\n";
  out << "t";
  for (int c = 1; c <= path.dimension(); ++c) out << ",x" << c;
  out << "\n";
  char buf[64];
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", path.times[i]);
    out << buf;
    for (double x : path.knots[i]) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out << ',' << buf;
    }
    out << "\n";
  }
  return out.str();
}

void write_path_csv(const std::string& file, const Path& path,
                    const std::vector<std::string>& comment_lines) {
  std::ofstream out(file);
  if (!out) throw PathError("cannot write path file: " + file);
  out << format_path_csv(path, comment_lines);
}

} // namespace ldp
