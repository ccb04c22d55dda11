#pragma once

#include "ldp/legendre.hpp"
#include "ldp/path.hpp"
#include "ldp/rng.hpp"

#include <cstdint>
#include <string>

namespace ldp {

/// Microscopic chain realization: integer lattice states, position = eps * g.
struct Trajectory {
  std::vector<IVec> states;
  double epsilon = 0;
  std::uint64_t seed = 0;
  std::string model_id;

  long long steps() const { return static_cast<long long>(states.size()) - 1; }
};

Trajectory sample_chain(const ChainSpec& spec, std::uint64_t seed);

enum class InterpMode { Linear, Step };

/// Macroscopic path from a trajectory: linear interpolation between the
/// microscopic knots, or the piecewise-constant step version (knotted just
/// before each jump so the path object remains piecewise linear).
Path interpolate(const Trajectory& traj, InterpMode mode = InterpMode::Linear,
                 double horizon = -1.0);

struct TubeEstimate {
  double p_hat = 0;
  double stderr_ = 0;
  double ci_lo = 0, ci_hi = 0; // Wilson score interval (direct MC)
  long long n_samples = 0;
  std::string estimator; // direct | tilted | exhaustive
  // tilted-only weight diagnostics
  double weight_mean = 0;
  double weight_max = 0;
  double ess = 0;
  long long zero_weight_events = 0;
};

struct McOptions {
  int threads = 1;
  long long block_size = 8192; // fixed-size work units keep reductions deterministic
};

/// Direct Monte Carlo estimate of P(sup-norm distance of the interpolated
/// chain to the center < rho).
TubeEstimate tube_probability_mc(const ChainSpec& spec, const Path& center, double rho,
                                 long long n_samples, std::uint64_t seed,
                                 const McOptions& opt = {});

struct TiltSchedule {
  Vec times;                        // partition 0 = t_0 < ... < t_n = T
  std::vector<Vec> duals;           // lambda*_i per segment
  std::vector<TiltedMeasure> laws;  // nu_i per segment
  Path reference{{0, 1}, {{0}, {0}}};
};

/// Per-segment tilts whose tilted means reproduce the reference velocities.
/// Requires the reference velocities in the relative interior of the hull.
TiltSchedule make_tilt_schedule(const ChainSpec& spec, const Path& reference,
                                double mean_tol = 1e-9);

/// Importance-sampling estimate: proposal steps from the frozen tilted laws,
/// weights from the exact inhomogeneous chain law, so the estimator is
/// unbiased despite the freezing.
TubeEstimate tube_probability_tilted(const ChainSpec& spec, const Path& center,
                                     double rho, const TiltSchedule& schedule,
                                     long long n_samples, std::uint64_t seed,
                                     const McOptions& opt = {});

/// Exact tube probability by enumerating every step sequence and initial
/// point; |jumps|^steps must not exceed the cap.
TubeEstimate exhaustive_tube_probability(const ChainSpec& spec, const Path& center,
                                         double rho, long long cap = 1 << 20);

/// Exact expectation of the tilted estimator (weight times indicator under
/// the proposal), by the same enumeration; equals the exact tube probability
/// by the change-of-measure identity.
double exhaustive_tilted_expectation(const ChainSpec& spec, const Path& center,
                                     double rho, const TiltSchedule& schedule,
                                     long long cap = 1 << 20);

struct CoveringResult {
  double bound = 0;                  // exp(d*n*(log(rho/eta)+2))
  std::vector<Vec> lattice_points;   // explicit covering centers (optional)
};

/// Covering-number bound for tube centers; requires rho > 2*eta. When
/// explicit_points is true the Cartesian lattice with spacing eta/sqrt(d)
/// inside the rho-box is returned too (small d*n only).
CoveringResult covering_count(double rho, double eta, int n, int d,
                              bool explicit_points = false);

} // namespace ldp
