#pragma once

#include "ldp/hull.hpp"
#include "ldp/model.hpp"

namespace ldp {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Log jump weights at a fixed (s,u); -inf marks jumps outside the support.
struct LocalLaw {
  Vec logw;
  std::vector<int> support() const;
};

LocalLaw local_law(const ChainSpec& spec, EvalMode mode, double s, const Vec& u);

/// Log moment generating function of the local jump law,
///   log sum_delta exp((v,delta) + f(s,u,delta)),
/// evaluated max-shifted over the supported jumps; -inf on empty support.
double log_mgf(const JumpSet& jumps, const LocalLaw& law, const Vec& v);
double log_mgf(const ChainSpec& spec, EvalMode mode, double s, const Vec& u,
               const Vec& v);

struct TiltedMeasure {
  Vec prob; // one entry per jump vector, zero off the support
  Vec tilt;
  double s = 0;
  Vec u;
};

TiltedMeasure tilted_measure(const JumpSet& jumps, const LocalLaw& law, const Vec& v);
TiltedMeasure tilted_measure(const ChainSpec& spec, EvalMode mode, double s,
                             const Vec& u, const Vec& v);

/// Gradient of the log-MGF in v: the mean jump under the tilted measure.
Vec mgf_grad(const JumpSet& jumps, const LocalLaw& law, const Vec& v);
Vec mgf_grad(const ChainSpec& spec, EvalMode mode, double s, const Vec& u, const Vec& v);
/// Hessian: the jump covariance under the tilted measure.
Mat mgf_hess(const JumpSet& jumps, const LocalLaw& law, const Vec& v);
Mat mgf_hess(const ChainSpec& spec, EvalMode mode, double s, const Vec& u, const Vec& v);

enum class BoundaryFlag { Interior, RelBoundary, OutsideDomain };

struct LegendrePoint {
  double value = 0;
  Vec dual;              // maximizing tilt vector
  double grad_residual = 0; // ||tilted mean - vstar|| at the solution
  BoundaryFlag flag = BoundaryFlag::Interior;
  int iterations = 0;
};

struct LegendreOptions {
  double tol = 1e-10;
  int max_iters = 100;
  double boundary_tol = 1e-9;
};

/// Legendre-Fenchel transform sup_v {(v,vstar) - L(s,u,v)}. Damped Newton on
/// the relative interior of conv(supp); on the relative boundary the problem
/// is restricted to the minimal face, where it is smooth again; +inf outside.
LegendrePoint legendre_transform(const JumpSet& jumps, const LocalLaw& law,
                                 const Vec& vstar, const LegendreOptions& opt = {});
LegendrePoint legendre_transform(const ChainSpec& spec, EvalMode mode, double s,
                                 const Vec& u, const Vec& vstar,
                                 const LegendreOptions& opt = {});

struct GridOracleResult {
  double value = -kInf;
  bool max_on_box_boundary = false; // diverging sup indicator
};

/// Independent brute-force lower bound: max over a product grid in v of
/// (v,vstar) - L(s,u,v).
GridOracleResult legendre_oracle_grid(const ChainSpec& spec, EvalMode mode, double s,
                                      const Vec& u, const Vec& vstar, const Vec& box_lo,
                                      const Vec& box_hi, int points_per_dim);

/// Independent entropy oracle: brute-force minimization of the relative
/// entropy sum mu log(mu/nu0) over a simplex grid of resolution 1/grid_n,
/// subject to |mean(mu) - vstar| <= band. +inf when infeasible.
double entropy_rate(const ChainSpec& spec, EvalMode mode, double s, const Vec& u,
                    const Vec& vstar, int grid_n, double band);

/// Grid of regularization sample points on the (s',u') ball of radius r.
struct RegGrid {
  std::vector<double> s_values;
  std::vector<Vec> u_values; // paired with s via all combinations
  std::vector<LocalLaw> laws; // laws[si * u_values.size() + ui]
};

RegGrid make_reg_grid(const ChainSpec& spec, EvalMode mode, double s, const Vec& u,
                      double r, double grid_step);

/// sup over the ball grid of L(s',u',v).
double reg_lagrangian(const ChainSpec& spec, EvalMode mode, double s, const Vec& u,
                      const Vec& v, double r, double grid_step);
double reg_lagrangian(const JumpSet& jumps, const RegGrid& grid, const Vec& v);

/// inf over the ball grid of L*(s',u',vstar).
double reg_legendre(const ChainSpec& spec, EvalMode mode, double s, const Vec& u,
                    const Vec& vstar, double r, double grid_step);

/// Legendre transform of the regularized Lagrangian, by adaptive grid search
/// in v (the objective is concave in v).
double legendre_of_reg(const ChainSpec& spec, EvalMode mode, double s, const Vec& u,
                       const Vec& vstar, double r, double grid_step,
                       double v_halfwidth = 8.0, int coarse_points = 33,
                       int refinements = 8);

/// L^(r)* along a decreasing r sequence; the last entry estimates the
/// envelope value lim_{r->0} L^(r)*.
Vec envelope_lagrangian(const ChainSpec& spec, EvalMode mode, double s, const Vec& u,
                        const Vec& vstar, const Vec& r_sequence, double grid_step);

} // namespace ldp
