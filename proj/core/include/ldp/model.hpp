#pragma once

#include "ldp/linalg.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace ldp {

using IVec = std::vector<long long>;

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An enumeration or budget cap was exceeded.
struct CapError : ModelError {
  using ModelError::ModelError;
};

/// Finite set of lattice displacement vectors whose convex hull is
/// full-dimensional.
struct JumpSet {
  std::vector<IVec> vectors;
  int dimension = 0;

  explicit JumpSet(std::vector<IVec> vecs);

  std::size_t size() const { return vectors.size(); }
  Vec vec(int j) const; // j-th jump as a real vector
  std::vector<Vec> as_real() const;
  double diameter() const;
};

/// Convex state-space domain: all of R^d, an axis-aligned box, or an
/// intersection of half-spaces normals[i].x <= offsets[i].
struct Domain {
  enum class Kind { All, Box, HalfSpaces };

  Kind kind = Kind::All;
  int dimension = 0;
  Vec lo, hi;   // Box
  Mat normals;  // HalfSpaces
  Vec offsets;

  static Domain all(int d);
  static Domain box(Vec lo, Vec hi);
  static Domain halfspaces(Mat normals, Vec offsets, int d);

  bool contains(const Vec& x) const;
  bool strictly_inside(const Vec& x) const;
  bool is_all() const { return kind == Kind::All; }
  /// Euclidean distance to the complement; +inf for Kind::All, 0 outside.
  double dist_to_complement(const Vec& x) const;
  /// Nearest point at distance >= margin from the complement.
  Vec project_interior(const Vec& x, double margin) const;
};

/// x in int_eps(domain): all jumps x + eps*delta stay inside.
bool in_eps_interior(const Domain& dom, const JumpSet& jumps, double eps, const Vec& x);

/// {delta : x + eps*delta in domain} (indices into the jump set).
std::vector<int> allowed_jumps(const Domain& dom, const JumpSet& jumps, double eps,
                               const Vec& x);
/// {delta : x + eps*delta in domain for some eps > 0}.
std::vector<int> allowed_jumps_limit(const Domain& dom, const JumpSet& jumps,
                                     const Vec& x);

/// Log transition weights f_eps = f0 + eps*f1 with limit f; -inf encodes a
/// forbidden jump. The Lipschitz/boundedness constants are declared by the
/// model and audited by hypothesis_probe, not derived symbolically.
struct RateField {
  std::function<double(double s, const Vec& x, int j)> f0;
  std::function<double(double s, const Vec& x, int j)> f1;
  std::function<double(double s, const Vec& x, int j)> f_limit;
  double theta = 0;             // time-Lipschitz constant of f0
  double vartheta = 0;          // space-Lipschitz constant on the declared compact
  double f1_bound = 0;          // sup |f1| on the declared compact
  double positivity_floor = 0;  // weight floor on the declared compact
  double eps_max = 1.0;         // validity threshold for the hypotheses
  Vec compact_lo, compact_hi;   // the compact set the constants refer to
};

enum class EvalMode { FiniteEps, Limit };

struct ChainSpec {
  double epsilon = 0;
  JumpSet jump_set{{{-1}, {1}}}; // placeholder, overwritten by make_chain_spec
  Domain domain;
  RateField rate_field;
  Vec phi0;
  double horizon = 0;
  std::string model_id;
  Mat lattice_basis; // rows generate the jump lattice (integer entries)

  int dimension() const { return jump_set.dimension; }
  long long micro_steps() const { return static_cast<long long>(horizon / epsilon); }

  /// Log weight of jump j at (s, x): f0 + eps*f1 or the eps->0 limit.
  double log_weight(double s, const Vec& x, int j, EvalMode mode) const;
  /// Transition probability g of jump j at (s, x) in the requested mode.
  double weight(double s, const Vec& x, int j, EvalMode mode) const;

  void validate() const;
};

ChainSpec make_chain_spec(double epsilon, JumpSet jumps, Domain dom, RateField field,
                          Vec phi0, double horizon, std::string model_id);

/// Lattice points g (integer coordinates, position eps*g) within eps*sqrt(d)
/// of phi0 and inside the domain; the initial law is uniform over them.
std::vector<IVec> initial_support(const ChainSpec& spec);

Vec lattice_point_position(const ChainSpec& spec, const IVec& g);

// ---- built-in models ----

ChainSpec builtin_symmetric_walk(int d, double epsilon = 0.01, double horizon = 1.0);

/// Mean-field spin-flip dynamics on magnetization in [-1,1] with jumps
/// {-2, 0, +2} and external field h(s) = amplitude*sin(frequency*s).
ChainSpec builtin_curie_weiss(double beta, double field_amplitude = 0.0,
                              double field_frequency = 1.0, double epsilon = 0.01,
                              double horizon = 1.0, double phi0 = 0.0);

// ---- audits ----

struct NormalizationReport {
  double max_deviation = 0;
  bool ok = false;
  int worst_index = -1;
};

/// Max |sum_delta g_eps - 1| over the sample points; throws ModelError with
/// the offending index if a point lies outside the domain.
NormalizationReport normalization_check(const ChainSpec& spec,
                                        const std::vector<std::pair<double, Vec>>& points,
                                        double tol = 1e-12);

struct SamplingPlan {
  Vec box_lo, box_hi; // compact S, must lie inside int(domain)
  double s_min = 0, s_max = 1;
  int s_points = 11;
  int x_points = 11; // per dimension
};

struct HypothesisEstimates {
  double theta_hat = 0;
  double vartheta_hat = 0;
  double f1_bound_hat = 0;
  double positivity_floor_hat = 0;
  bool within_declared = false;
};

/// Finite-difference Lipschitz estimates over a grid on the compact S.
HypothesisEstimates hypothesis_probe(const ChainSpec& spec, const SamplingPlan& plan);

} // namespace ldp
