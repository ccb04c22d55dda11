#include "ldp/model.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <set>

namespace ldp {

JumpSet::JumpSet(std::vector<IVec> vecs) : vectors(std::move(vecs)) {
  if (vectors.empty()) throw ModelError("jump set must be non-empty");
  dimension = static_cast<int>(vectors[0].size());
  if (dimension < 1) throw ModelError("jump set dimension must be >= 1");
  std::set<IVec> seen;
  for (const auto& v : vectors) {
    if (static_cast<int>(v.size()) != dimension)
      throw ModelError("jump vectors have inconsistent dimensions");
    if (!seen.insert(v).second) throw ModelError("duplicate jump vector");
  }
  // conv(Delta) must have affine dimension d: centered vectors have rank d.
  Vec mean(dimension, 0.0);
  for (const auto& v : vectors)
    for (int i = 0; i < dimension; ++i) mean[i] += static_cast<double>(v[i]);
  for (auto& m : mean) m /= static_cast<double>(vectors.size());
  Mat centered;
  for (const auto& v : vectors) {
    Vec row(dimension);
    for (int i = 0; i < dimension; ++i) row[i] = static_cast<double>(v[i]) - mean[i];
    centered.push_back(std::move(row));
  }
  if (matrix_rank(centered) != dimension)
    throw ModelError("convex hull of jump set is not full-dimensional");
  if (diameter() <= 0) throw ModelError("jump set diameter must be positive");
}

Vec JumpSet::vec(int j) const {
  Vec r(dimension);
  for (int i = 0; i < dimension; ++i) r[i] = static_cast<double>(vectors[j][i]);
  return r;
}

std::vector<Vec> JumpSet::as_real() const {
  std::vector<Vec> out;
  out.reserve(vectors.size());
  for (std::size_t j = 0; j < vectors.size(); ++j) out.push_back(vec(static_cast<int>(j)));
  return out;
}

double JumpSet::diameter() const {
  double best = 0;
  for (std::size_t i = 0; i < vectors.size(); ++i)
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      double s = 0;
      for (int k = 0; k < dimension; ++k) {
        double d = static_cast<double>(vectors[i][k] - vectors[j][k]);
        s += d * d;
      }
      best = std::max(best, std::sqrt(s));
    }
  return best;
}

Domain Domain::all(int d) {
  Domain dom;
  dom.kind = Kind::All;
  dom.dimension = d;
  return dom;
}

Domain Domain::box(Vec lo, Vec hi) {
  Domain dom;
  dom.kind = Kind::Box;
  dom.dimension = static_cast<int>(lo.size());
  if (lo.size() != hi.size()) throw ModelError("box bounds size mismatch");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw ModelError("box bounds must satisfy lo < hi");
  dom.lo = std::move(lo);
  dom.hi = std::move(hi);
  return dom;
}

Domain Domain::halfspaces(Mat normals, Vec offsets, int d) {
  Domain dom;
  dom.kind = Kind::HalfSpaces;
  dom.dimension = d;
  if (normals.size() != offsets.size()) throw ModelError("half-space size mismatch");
  dom.normals = std::move(normals);
  dom.offsets = std::move(offsets);
  return dom;
}

bool Domain::contains(const Vec& x) const {
  switch (kind) {
    case Kind::All:
      return true;
    case Kind::Box:
      for (std::size_t i = 0; i < lo.size(); ++i)
        if (x[i] < lo[i] || x[i] > hi[i]) return false;
      return true;
    case Kind::HalfSpaces:
      for (std::size_t i = 0; i < normals.size(); ++i)
        if (dot(normals[i], x) > offsets[i]) return false;
      return true;
  }
  return false;
}

bool Domain::strictly_inside(const Vec& x) const {
  switch (kind) {
    case Kind::All:
      return true;
    case Kind::Box:
      for (std::size_t i = 0; i < lo.size(); ++i)
        if (x[i] <= lo[i] || x[i] >= hi[i]) return false;
      return true;
    case Kind::HalfSpaces:
      for (std::size_t i = 0; i < normals.size(); ++i)
        if (dot(normals[i], x) >= offsets[i]) return false;
      return true;
  }
  return false;
}

double Domain::dist_to_complement(const Vec& x) const {
  if (!contains(x)) return 0.0;
  switch (kind) {
    case Kind::All:
      return kInf;
    case Kind::Box: {
      double best = kInf;
      for (std::size_t i = 0; i < lo.size(); ++i)
        best = std::min({best, x[i] - lo[i], hi[i] - x[i]});
      return std::max(best, 0.0);
    }
    case Kind::HalfSpaces: {
      double best = kInf;
      for (std::size_t i = 0; i < normals.size(); ++i)
        best = std::min(best, (offsets[i] - dot(normals[i], x)) / norm(normals[i]));
      return std::max(best, 0.0);
    }
  }
  return 0.0;
}

Vec Domain::project_interior(const Vec& x, double margin) const {
  switch (kind) {
    case Kind::All:
      return x;
    case Kind::Box: {
      Vec r = x;
      for (std::size_t i = 0; i < lo.size(); ++i)
        r[i] = std::clamp(r[i], lo[i] + margin, hi[i] - margin);
      return r;
    }
    case Kind::HalfSpaces: {
      // Cyclic projection onto the margin-tightened half-spaces.
      Vec r = x;
      for (int round = 0; round < 64; ++round) {
        bool moved = false;
        for (std::size_t i = 0; i < normals.size(); ++i) {
          double nn = dot(normals[i], normals[i]);
          double excess = dot(normals[i], r) - (offsets[i] - margin * std::sqrt(nn));
          if (excess > 0) {
            axpy(-excess / nn, normals[i], r);
            moved = true;
          }
        }
        if (!moved) break;
      }
      return r;
    }
  }
  return x;
}

bool in_eps_interior(const Domain& dom, const JumpSet& jumps, double eps, const Vec& x) {
  if (!dom.contains(x)) return false;
  for (std::size_t j = 0; j < jumps.size(); ++j) {
    Vec y = x;
    axpy(eps, jumps.vec(static_cast<int>(j)), y);
    if (!dom.contains(y)) return false;
  }
  return true;
}

std::vector<int> allowed_jumps(const Domain& dom, const JumpSet& jumps, double eps,
                               const Vec& x) {
  std::vector<int> out;
  for (std::size_t j = 0; j < jumps.size(); ++j) {
    Vec y = x;
    axpy(eps, jumps.vec(static_cast<int>(j)), y);
    if (dom.contains(y)) out.push_back(static_cast<int>(j));
  }
  return out;
}

std::vector<int> allowed_jumps_limit(const Domain& dom, const JumpSet& jumps,
                                     const Vec& x) {
  std::vector<int> out;
  // For a convex domain, membership of x + eps*delta for some eps > 0 is
  // monotone as eps decreases, so a small probe suffices.
  for (std::size_t j = 0; j < jumps.size(); ++j) {
    for (double eps : {1e-6, 1e-9, 1e-12}) {
      Vec y = x;
      axpy(eps, jumps.vec(static_cast<int>(j)), y);
      if (dom.contains(y)) {
        out.push_back(static_cast<int>(j));
        break;
      }
    }
  }
  return out;
}

double ChainSpec::log_weight(double s, const Vec& x, int j, EvalMode mode) const {
  if (!domain.contains(x)) return -kInf;
  if (mode == EvalMode::Limit) return rate_field.f_limit(s, x, j);
  double a = rate_field.f0(s, x, j);
  if (a == -kInf) return -kInf;
  return a + epsilon * rate_field.f1(s, x, j);
}

double ChainSpec::weight(double s, const Vec& x, int j, EvalMode mode) const {
  double lw = log_weight(s, x, j, mode);
  return lw == -kInf ? 0.0 : std::exp(lw);
}

void ChainSpec::validate() const {
  if (!(epsilon > 0)) throw ModelError("epsilon must be positive");
  if (!(horizon > 0)) throw ModelError("horizon must be positive");
  if (static_cast<int>(phi0.size()) != dimension())
    throw ModelError("phi0 dimension mismatch");
  if (!domain.contains(phi0)) throw ModelError("phi0 must lie in the domain");
  if (micro_steps() < 1) throw ModelError("horizon/epsilon must allow at least one step");
}

namespace {

// Hermite-style integer row reduction: basis of the lattice generated by the
// given integer vectors.
Mat lattice_basis_of(const std::vector<IVec>& gens, int d) {
  std::vector<IVec> rows = gens;
  int r = 0;
  for (int col = 0; col < d && r < static_cast<int>(rows.size()); ++col) {
    for (;;) {
      int piv = -1;
      long long best = 0;
      for (int i = r; i < static_cast<int>(rows.size()); ++i) {
        long long v = std::llabs(rows[i][col]);
        if (v != 0 && (piv < 0 || v < best)) {
          piv = i;
          best = v;
        }
      }
      if (piv < 0) break;
      std::swap(rows[r], rows[piv]);
      bool clean = true;
      for (int i = r + 1; i < static_cast<int>(rows.size()); ++i) {
        if (rows[i][col] == 0) continue;
        long long q = rows[i][col] / rows[r][col];
        for (int c = 0; c < d; ++c) rows[i][c] -= q * rows[r][c];
        if (rows[i][col] != 0) clean = false;
      }
      if (clean) break;
    }
    bool nonzero = rows[r][col] != 0;
    if (nonzero) ++r;
  }
  Mat basis;
  for (int i = 0; i < r; ++i) {
    Vec row(d);
    for (int c = 0; c < d; ++c) row[c] = static_cast<double>(rows[i][c]);
    basis.push_back(std::move(row));
  }
  return basis;
}

// Does the integer point g lie in the lattice spanned by the (triangular)
// basis rows? Back-substitution with divisibility checks.
bool in_lattice(const Mat& basis, const IVec& g) {
  const int d = static_cast<int>(g.size());
  std::vector<long long> rem(g.begin(), g.end());
  // Basis rows are in echelon form: row i has its first nonzero at some
  // column lead[i], strictly increasing in i.
  int row = static_cast<int>(basis.size()) - 1;
  for (int col = d - 1; col >= 0 && row >= 0; --col) {
    int lead = -1;
    for (int c = 0; c < d; ++c)
      if (basis[row][c] != 0) { lead = c; break; }
    if (lead != col) continue;
    long long b = static_cast<long long>(basis[row][col]);
    if (rem[col] % b != 0) return false;
    long long q = rem[col] / b;
    for (int c = 0; c < d; ++c) rem[c] -= q * static_cast<long long>(basis[row][c]);
    --row;
  }
  for (int c = 0; c < d; ++c)
    if (rem[c] != 0) return false;
  return true;
}

} // namespace

ChainSpec make_chain_spec(double epsilon, JumpSet jumps, Domain dom, RateField field,
                          Vec phi0, double horizon, std::string model_id) {
  ChainSpec spec;
  spec.epsilon = epsilon;
  spec.jump_set = std::move(jumps);
  spec.domain = std::move(dom);
  spec.rate_field = std::move(field);
  spec.phi0 = std::move(phi0);
  spec.horizon = horizon;
  spec.model_id = std::move(model_id);
  spec.lattice_basis = lattice_basis_of(spec.jump_set.vectors, spec.jump_set.dimension);
  spec.validate();
  return spec;
}

Vec lattice_point_position(const ChainSpec& spec, const IVec& g) {
  Vec x(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    x[i] = spec.epsilon * static_cast<double>(g[i]);
  return x;
}

std::vector<IVec> initial_support(const ChainSpec& spec) {
  const int d = spec.dimension();
  const double radius = std::sqrt(static_cast<double>(d));
  // Integer box around phi0/eps wide enough to cover the sqrt(d)-ball.
  const long long half = static_cast<long long>(std::ceil(radius)) + 1;
  std::vector<long long> center(d);
  for (int i = 0; i < d; ++i)
    center[i] = static_cast<long long>(std::llround(spec.phi0[i] / spec.epsilon));

  std::vector<IVec> out;
  IVec g(d, 0);
  std::function<void(int)> rec = [&](int k) {
    if (k == d) {
      double dist2 = 0;
      for (int i = 0; i < d; ++i) {
        double diff = spec.epsilon * static_cast<double>(g[i]) - spec.phi0[i];
        dist2 += diff * diff;
      }
      if (dist2 > radius * radius * spec.epsilon * spec.epsilon + 1e-18) return;
      if (!in_lattice(spec.lattice_basis, g)) return;
      if (!spec.domain.contains(lattice_point_position(spec, g))) return;
      out.push_back(g);
      return;
    }
    for (long long v = center[k] - half; v <= center[k] + half; ++v) {
      g[k] = v;
      rec(k + 1);
    }
  };
  rec(0);
  if (out.empty()) throw ModelError("initial distribution has empty support");
  return out;
}

ChainSpec builtin_symmetric_walk(int d, double epsilon, double horizon) {
  if (d < 1) throw ModelError("symmetric walk requires d >= 1");
  std::vector<IVec> jumps;
  for (int i = 0; i < d; ++i) {
    IVec plus(d, 0), minus(d, 0);
    plus[i] = 1;
    minus[i] = -1;
    jumps.push_back(plus);
    jumps.push_back(minus);
  }
  const double logw = -std::log(2.0 * d);
  RateField field;
  field.f0 = [logw](double, const Vec&, int) { return logw; };
  field.f1 = [](double, const Vec&, int) { return 0.0; };
  field.f_limit = [logw](double, const Vec&, int) { return logw; };
  field.theta = 0;
  field.vartheta = 0;
  field.f1_bound = 0;
  field.positivity_floor = 1.0 / (2.0 * d);
  field.compact_lo = Vec(d, -1.0);
  field.compact_hi = Vec(d, 1.0);
  return make_chain_spec(epsilon, JumpSet(std::move(jumps)), Domain::all(d),
                         std::move(field), Vec(d, 0.0), horizon, "symmetric_walk");
}

ChainSpec builtin_curie_weiss(double beta, double field_amplitude,
                              double field_frequency, double epsilon, double horizon,
                              double phi0) {
  if (beta < 0) throw ModelError("beta must be nonnegative");
  auto h = [=](double s) { return field_amplitude * std::sin(field_frequency * s); };
  // Jumps +2/-2 are a single spin flip in magnetization units; the lazy jump
  // 0 absorbs the remaining mass so the weights sum to one exactly.
  auto logg = [beta, h](double s, const Vec& x, int j) -> double {
    const double m = x[0];
    if (m < -1.0 || m > 1.0) return -kInf;
    const double a = beta * (m + h(s));
    const double log2cosh = std::fabs(a) + std::log1p(std::exp(-2.0 * std::fabs(a)));
    switch (j) {
      case 0: { // +2
        if (m >= 1.0) return -kInf;
        return std::log((1.0 - m) / 2.0) + a - log2cosh;
      }
      case 1: { // -2
        if (m <= -1.0) return -kInf;
        return std::log((1.0 + m) / 2.0) - a - log2cosh;
      }
      default: { // 0: g0 = (1 + m*tanh(a)) / 2 > 0 on [-1,1]
        return std::log1p(m * std::tanh(a)) - std::log(2.0);
      }
    }
  };
  RateField field;
  field.f0 = logg;
  field.f1 = [](double, const Vec&, int) { return 0.0; };
  field.f_limit = logg;
  const double m_max = 0.9; // declared compact S = [-0.9, 0.9]
  field.theta = 2.0 * beta * field_amplitude * field_frequency + 1e-9;
  field.vartheta = 2.0 / (1.0 - m_max) + 2.0 * beta + 1e-9;
  field.f1_bound = 0;
  {
    // Weight floor on S: minimized at |m| = m_max with the field saturated.
    double a_max = beta * (m_max + std::fabs(field_amplitude));
    field.positivity_floor =
        0.5 * (1.0 - m_max) * std::exp(-a_max) / (2.0 * std::cosh(a_max));
  }
  field.compact_lo = {-m_max};
  field.compact_hi = {m_max};
  return make_chain_spec(epsilon, JumpSet({{2}, {-2}, {0}}),
                         Domain::box({-1.0}, {1.0}), std::move(field), Vec{phi0},
                         horizon, "curie_weiss");
}

NormalizationReport normalization_check(const ChainSpec& spec,
                                        const std::vector<std::pair<double, Vec>>& points,
                                        double tol) {
  NormalizationReport rep;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& [s, x] = points[i];
    if (s < 0 || !spec.domain.contains(x))
      throw ModelError("normalization_check: point " + std::to_string(i) +
                       " outside R+ x domain");
    double sum = 0;
    for (std::size_t j = 0; j < spec.jump_set.size(); ++j)
      sum += spec.weight(s, x, static_cast<int>(j), EvalMode::FiniteEps);
    double dev = std::fabs(sum - 1.0);
    if (dev > rep.max_deviation) {
      rep.max_deviation = dev;
      rep.worst_index = static_cast<int>(i);
    }
  }
  rep.ok = rep.max_deviation <= tol;
  return rep;
}

HypothesisEstimates hypothesis_probe(const ChainSpec& spec, const SamplingPlan& plan) {
  const int d = spec.dimension();
  if (static_cast<int>(plan.box_lo.size()) != d ||
      static_cast<int>(plan.box_hi.size()) != d)
    throw ModelError("hypothesis_probe: plan box dimension mismatch");
  for (const Vec& corner : {plan.box_lo, plan.box_hi})
    if (!spec.domain.strictly_inside(corner))
      throw ModelError("hypothesis_probe: compact S not inside int(domain)");

  // Grid on S (product grid) and on [s_min, s_max].
  std::vector<Vec> xs;
  {
    std::vector<int> idx(d, 0);
    for (;;) {
      Vec x(d);
      for (int i = 0; i < d; ++i) {
        double t = plan.x_points == 1
                       ? 0.5
                       : static_cast<double>(idx[i]) / (plan.x_points - 1);
        x[i] = plan.box_lo[i] + t * (plan.box_hi[i] - plan.box_lo[i]);
      }
      xs.push_back(std::move(x));
      int k = 0;
      while (k < d && ++idx[k] == plan.x_points) idx[k++] = 0;
      if (k == d) break;
    }
  }
  Vec ss(plan.s_points);
  for (int i = 0; i < plan.s_points; ++i)
    ss[i] = plan.s_min + (plan.s_max - plan.s_min) *
                             (plan.s_points == 1 ? 0.5 : static_cast<double>(i) /
                                                             (plan.s_points - 1));

  HypothesisEstimates est;
  est.positivity_floor_hat = kInf;
  const int m = static_cast<int>(spec.jump_set.size());
  for (const auto& x : xs) {
    for (std::size_t si = 0; si < ss.size(); ++si) {
      for (int j = 0; j < m; ++j) {
        double v0 = spec.rate_field.f0(ss[si], x, j);
        if (v0 == -kInf)
          throw ModelError("hypothesis_probe: forbidden jump inside S");
        est.f1_bound_hat =
            std::max(est.f1_bound_hat, std::fabs(spec.rate_field.f1(ss[si], x, j)));
        est.positivity_floor_hat = std::min(
            est.positivity_floor_hat, spec.weight(ss[si], x, j, EvalMode::FiniteEps));
        if (si + 1 < ss.size()) {
          double v1 = spec.rate_field.f0(ss[si + 1], x, j);
          est.theta_hat = std::max(
              est.theta_hat, std::fabs(v1 - v0) / std::fabs(ss[si + 1] - ss[si]));
        }
      }
    }
  }
  // Space Lipschitz estimate over axis-aligned neighbor pairs.
  for (const auto& x : xs) {
    for (int i = 0; i < d; ++i) {
      double step = (plan.box_hi[i] - plan.box_lo[i]) /
                    std::max(1, plan.x_points - 1);
      Vec y = x;
      y[i] += step;
      if (y[i] > plan.box_hi[i] + 1e-12) continue;
      for (double s : {ss.front(), ss.back()}) {
        for (int j = 0; j < m; ++j) {
          double a = spec.rate_field.f0(s, x, j);
          double b = spec.rate_field.f0(s, y, j);
          est.vartheta_hat = std::max(est.vartheta_hat, std::fabs(b - a) / step);
        }
      }
    }
  }
  est.within_declared = est.theta_hat <= spec.rate_field.theta * 1.01 + 1e-12 &&
                        est.vartheta_hat <= spec.rate_field.vartheta * 1.01 + 1e-12 &&
                        est.f1_bound_hat <= spec.rate_field.f1_bound * 1.01 + 1e-12;
  return est;
}

} // namespace ldp
