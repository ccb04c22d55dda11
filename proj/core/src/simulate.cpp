#include "ldp/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

namespace ldp {

namespace {

Vec position(const IVec& g, double eps) {
  Vec x(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) x[c] = eps * static_cast<double>(g[c]);
  return x;
}

IVec pick_initial(const std::vector<IVec>& support, CounterRng& rng) {
  double u = rng.next_double();
  std::size_t idx = std::min(support.size() - 1,
                             static_cast<std::size_t>(u * support.size()));
  return support[idx];
}

std::vector<IVec> simulate_states(const ChainSpec& spec,
                                  const std::vector<IVec>& support, CounterRng& rng) {
  const long long steps = spec.micro_steps();
  std::vector<IVec> states;
  states.reserve(static_cast<std::size_t>(steps) + 1);
  states.push_back(pick_initial(support, rng));
  Vec cum(spec.jump_set.size());
  for (long long k = 0; k < steps; ++k) {
    double s = spec.epsilon * static_cast<double>(k);
    Vec x = position(states.back(), spec.epsilon);
    double total = 0;
    for (std::size_t j = 0; j < cum.size(); ++j) {
      total += spec.weight(s, x, static_cast<int>(j), EvalMode::FiniteEps);
      cum[j] = total;
    }
    if (total <= 1e-14)
      throw ModelError("sample_chain: state with zero total jump mass");
    int j = rng.next_categorical(cum);
    IVec g = states.back();
    for (std::size_t c = 0; c < g.size(); ++c) g[c] += spec.jump_set.vectors[j][c];
    states.push_back(std::move(g));
  }
  return states;
}

/// Exact sup-norm tube test between the linearly interpolated trajectory and
/// a piecewise-linear center: the sup is attained on the union of both
/// breakpoint sets, each prepared once as (micro index, fraction, center value).
struct TubeChecker {
  struct CheckPoint {
    long long k = 0;    // floor(t / eps), clamped to the last micro index
    double frac = 0;    // interpolation weight toward state k+1
    Vec center_value;
  };
  std::vector<CheckPoint> points;
  double rho = 0;
  double eps = 0;
  long long steps = 0;

  TubeChecker(const ChainSpec& spec, const Path& center, double rho_in)
      : rho(rho_in), eps(spec.epsilon), steps(spec.micro_steps()) {
    Vec times;
    for (long long k = 0; k <= steps; ++k)
      times.push_back(eps * static_cast<double>(k));
    for (double t : center.times)
      if (t >= 0 && t <= center.horizon()) times.push_back(t);
    times.push_back(center.horizon());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    for (double t : times) {
      CheckPoint cp;
      double raw = t / eps;
      cp.k = std::min<long long>(steps, static_cast<long long>(std::floor(raw + 1e-12)));
      if (cp.k >= steps) {
        cp.k = steps;  // beyond the last step the path is frozen
        cp.frac = 0;
      } else {
        cp.frac = raw - static_cast<double>(cp.k);
        if (cp.frac < 1e-12) cp.frac = 0;
      }
      cp.center_value = center.at(t);
      points.push_back(std::move(cp));
    }
  }

  /// Checks every point determined by the state prefix [0, upto]; returns
  /// false as soon as the tube is left (strict inequality membership).
  bool prefix_ok(const std::vector<IVec>& states, long long upto) const {
    for (const auto& cp : points) {
      long long need = cp.frac > 0 ? cp.k + 1 : cp.k;
      if (need > upto) continue;
      double d2 = 0;
      for (std::size_t c = 0; c < cp.center_value.size(); ++c) {
        double y = eps * static_cast<double>(states[cp.k][c]);
        if (cp.frac > 0)
          y += cp.frac * eps *
               static_cast<double>(states[cp.k + 1][c] - states[cp.k][c]);
        double diff = y - cp.center_value[c];
        d2 += diff * diff;
      }
      if (d2 >= rho * rho) return false;
    }
    return true;
  }

  bool inside(const std::vector<IVec>& states) const {
    return prefix_ok(states, steps);
  }
};

/// Deterministic parallel map over fixed-size blocks: block b always covers
/// samples [b*block, ...) and partial results are reduced in block order.
template <typename BlockFn>
void run_blocks(long long n_samples, const McOptions& opt, BlockFn&& fn) {
  long long block = std::max<long long>(1, opt.block_size);
  long long n_blocks = (n_samples + block - 1) / block;
  int threads = std::max(1, opt.threads);
  if (threads == 1 || n_blocks == 1) {
    for (long long b = 0; b < n_blocks; ++b)
      fn(b, b * block, std::min(n_samples, (b + 1) * block));
    return;
  }
  std::atomic<long long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      long long b = next.fetch_add(1);
      if (b >= n_blocks) return;
      try {
        fn(b, b * block, std::min(n_samples, (b + 1) * block));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double wilson_lo(double p, long long n, double z) {
  double denom = 1 + z * z / n;
  double center = p + z * z / (2 * n);
  double spread = z * std::sqrt(p * (1 - p) / n + z * z / (4.0 * n * n));
  return std::max(0.0, (center - spread) / denom);
}

double wilson_hi(double p, long long n, double z) {
  double denom = 1 + z * z / n;
  double center = p + z * z / (2 * n);
  double spread = z * std::sqrt(p * (1 - p) / n + z * z / (4.0 * n * n));
  return std::min(1.0, (center + spread) / denom);
}

} // namespace

Trajectory sample_chain(const ChainSpec& spec, std::uint64_t seed) {
  spec.validate();
  auto support = initial_support(spec);
  CounterRng rng(seed, 0);
  Trajectory traj;
  traj.states = simulate_states(spec, support, rng);
  traj.epsilon = spec.epsilon;
  traj.seed = seed;
  traj.model_id = spec.model_id;
  return traj;
}

Path interpolate(const Trajectory& traj, InterpMode mode, double horizon) {
  const double eps = traj.epsilon;
  const long long steps = traj.steps();
  Vec times;
  std::vector<Vec> knots;
  if (mode == InterpMode::Linear) {
    for (long long k = 0; k <= steps; ++k) {
      times.push_back(eps * static_cast<double>(k));
      knots.push_back(position(traj.states[k], eps));
    }
  } else {
    for (long long k = 0; k <= steps; ++k) {
      times.push_back(eps * static_cast<double>(k));
      knots.push_back(position(traj.states[k], eps));
      if (k < steps) {
        // hold the value until just before the next jump
        times.push_back(eps * (static_cast<double>(k) + 1.0 - 1e-9));
        knots.push_back(position(traj.states[k], eps));
      }
    }
  }
  if (horizon > times.back()) {
    times.push_back(horizon);
    knots.push_back(knots.back());
  }
  return Path(std::move(times), std::move(knots));
}

TubeEstimate tube_probability_mc(const ChainSpec& spec, const Path& center, double rho,
                                 long long n_samples, std::uint64_t seed,
                                 const McOptions& opt) {
  spec.validate();
  auto support = initial_support(spec);
  TubeChecker checker(spec, center, rho);

  long long block = std::max<long long>(1, opt.block_size);
  long long n_blocks = (n_samples + block - 1) / block;
  std::vector<long long> hits(static_cast<std::size_t>(n_blocks), 0);
  run_blocks(n_samples, opt, [&](long long b, long long lo, long long hi) {
    long long h = 0;
    for (long long i = lo; i < hi; ++i) {
      CounterRng rng(seed, static_cast<std::uint64_t>(i));
      auto states = simulate_states(spec, support, rng);
      if (checker.inside(states)) ++h;
    }
    hits[static_cast<std::size_t>(b)] = h;
  });
  long long total = 0;
  for (long long h : hits) total += h;

  TubeEstimate est;
  est.estimator = "direct";
  est.n_samples = n_samples;
  est.p_hat = static_cast<double>(total) / static_cast<double>(n_samples);
  est.stderr_ = std::sqrt(est.p_hat * (1 - est.p_hat) / static_cast<double>(n_samples));
  est.ci_lo = wilson_lo(est.p_hat, n_samples, 1.96);
  est.ci_hi = wilson_hi(est.p_hat, n_samples, 1.96);
  return est;
}

TiltSchedule make_tilt_schedule(const ChainSpec& spec, const Path& reference,
                                double mean_tol) {
  TiltSchedule sched;
  sched.times = reference.times;
  sched.reference = reference;
  for (int i = 0; i < reference.segments(); ++i) {
    double s = reference.times[i];
    const Vec& u = reference.knots[i];
    Vec v = reference.velocity(i);
    auto lp = legendre_transform(spec, EvalMode::FiniteEps, s, u, v);
    if (lp.flag != BoundaryFlag::Interior)
      throw ModelError("make_tilt_schedule: segment " + std::to_string(i) +
                       " velocity is not in the relative interior of the jump hull");
    auto nu = tilted_measure(spec, EvalMode::FiniteEps, s, u, lp.dual);
    Vec mean(spec.dimension(), 0.0);
    for (std::size_t j = 0; j < nu.prob.size(); ++j)
      axpy(nu.prob[j], spec.jump_set.vec(static_cast<int>(j)), mean);
    if (dist(mean, v) > mean_tol)
      throw NumericalError("make_tilt_schedule: tilted mean misses the velocity by " +
                           std::to_string(dist(mean, v)));
    sched.duals.push_back(lp.dual);
    sched.laws.push_back(std::move(nu));
  }
  return sched;
}

namespace {

/// Segment index of the schedule covering microscopic time s = k*eps.
int schedule_segment(const TiltSchedule& sched, double s) {
  int n = static_cast<int>(sched.times.size()) - 1;
  for (int i = 0; i < n; ++i)
    if (s < sched.times[i + 1] - 1e-12) return i;
  return n - 1;
}

} // namespace

TubeEstimate tube_probability_tilted(const ChainSpec& spec, const Path& center,
                                     double rho, const TiltSchedule& schedule,
                                     long long n_samples, std::uint64_t seed,
                                     const McOptions& opt) {
  spec.validate();
  auto support = initial_support(spec);
  TubeChecker checker(spec, center, rho);
  const long long steps = spec.micro_steps();

  // per-step proposal, resolved once
  std::vector<const TiltedMeasure*> step_law(static_cast<std::size_t>(steps));
  for (long long k = 0; k < steps; ++k) {
    double s = spec.epsilon * static_cast<double>(k);
    step_law[static_cast<std::size_t>(k)] =
        &schedule.laws[static_cast<std::size_t>(schedule_segment(schedule, s))];
  }

  long long block = std::max<long long>(1, opt.block_size);
  long long n_blocks = (n_samples + block - 1) / block;
  struct BlockStats {
    double sum_wi = 0, sum_wi2 = 0;  // weight * indicator moments
    double sum_w = 0, sum_w2 = 0;    // raw weight moments
    double max_w = 0;
    long long zero_events = 0;
  };
  std::vector<BlockStats> stats(static_cast<std::size_t>(n_blocks));

  run_blocks(n_samples, opt, [&](long long b, long long lo, long long hi) {
    BlockStats st;
    std::vector<IVec> states;
    Vec cum(spec.jump_set.size());
    for (long long i = lo; i < hi; ++i) {
      CounterRng rng(seed, static_cast<std::uint64_t>(i));
      states.clear();
      states.push_back(pick_initial(support, rng));
      double log_weight = 0;
      bool zero = false;
      for (long long k = 0; k < steps; ++k) {
        const TiltedMeasure& nu = *step_law[static_cast<std::size_t>(k)];
        double total = 0;
        for (std::size_t j = 0; j < cum.size(); ++j) {
          total += nu.prob[j];
          cum[j] = total;
        }
        int j = rng.next_categorical(cum);
        double s = spec.epsilon * static_cast<double>(k);
        Vec x = position(states.back(), spec.epsilon);
        double true_p = spec.weight(s, x, j, EvalMode::FiniteEps);
        if (true_p <= 0) {
          zero = true;
        } else {
          log_weight += std::log(true_p) - std::log(nu.prob[j]);
        }
        IVec g = states.back();
        for (std::size_t c = 0; c < g.size(); ++c) g[c] += spec.jump_set.vectors[j][c];
        states.push_back(std::move(g));
      }
      double w = zero ? 0.0 : std::exp(log_weight);
      if (zero) ++st.zero_events;
      st.sum_w += w;
      st.sum_w2 += w * w;
      st.max_w = std::max(st.max_w, w);
      if (w > 0 && checker.inside(states)) {
        st.sum_wi += w;
        st.sum_wi2 += w * w;
      }
    }
    stats[static_cast<std::size_t>(b)] = st;
  });

  BlockStats agg;
  for (const auto& st : stats) {
    agg.sum_wi += st.sum_wi;
    agg.sum_wi2 += st.sum_wi2;
    agg.sum_w += st.sum_w;
    agg.sum_w2 += st.sum_w2;
    agg.max_w = std::max(agg.max_w, st.max_w);
    agg.zero_events += st.zero_events;
  }

  TubeEstimate est;
  est.estimator = "tilted";
  est.n_samples = n_samples;
  double n = static_cast<double>(n_samples);
  est.p_hat = agg.sum_wi / n;
  double second = agg.sum_wi2 / n;
  est.stderr_ = std::sqrt(std::max(0.0, second - est.p_hat * est.p_hat) / n);
  est.weight_mean = agg.sum_w / n;
  est.weight_max = agg.max_w;
  est.ess = agg.sum_w2 > 0 ? agg.sum_w * agg.sum_w / agg.sum_w2 : 0.0;
  est.zero_weight_events = agg.zero_events;
  est.ci_lo = std::max(0.0, est.p_hat - 1.96 * est.stderr_);
  est.ci_hi = est.p_hat + 1.96 * est.stderr_;
  return est;
}

namespace {

void check_cap(const ChainSpec& spec, long long cap) {
  long long steps = spec.micro_steps();
  double combos = std::pow(static_cast<double>(spec.jump_set.size()),
                           static_cast<double>(steps));
  if (combos > static_cast<double>(cap))
    throw CapError("exhaustive enumeration needs cap >= " +
                     std::to_string(static_cast<long long>(std::ceil(combos))) +
                     " (" + std::to_string(spec.jump_set.size()) + "^" +
                     std::to_string(steps) + " sequences), got " + std::to_string(cap));
}

} // namespace

TubeEstimate exhaustive_tube_probability(const ChainSpec& spec, const Path& center,
                                         double rho, long long cap) {
  spec.validate();
  check_cap(spec, cap);
  auto support = initial_support(spec);
  TubeChecker checker(spec, center, rho);
  const long long steps = spec.micro_steps();
  const double init_p = 1.0 / static_cast<double>(support.size());

  double total = 0;
  std::vector<IVec> states;
  std::function<void(long long, double)> rec = [&](long long k, double prob) {
    if (!checker.prefix_ok(states, k)) return;
    if (k == steps) {
      total += prob;
      return;
    }
    double s = spec.epsilon * static_cast<double>(k);
    Vec x = position(states.back(), spec.epsilon);
    for (std::size_t j = 0; j < spec.jump_set.size(); ++j) {
      double p = spec.weight(s, x, static_cast<int>(j), EvalMode::FiniteEps);
      if (p <= 0) continue;
      IVec g = states.back();
      for (std::size_t c = 0; c < g.size(); ++c) g[c] += spec.jump_set.vectors[j][c];
      states.push_back(std::move(g));
      rec(k + 1, prob * p);
      states.pop_back();
    }
  };
  for (const auto& g0 : support) {
    states.assign(1, g0);
    rec(0, init_p);
  }

  TubeEstimate est;
  est.estimator = "exhaustive";
  est.p_hat = total;
  est.stderr_ = 0;
  est.ci_lo = est.ci_hi = total;
  est.n_samples = 0;
  return est;
}

double exhaustive_tilted_expectation(const ChainSpec& spec, const Path& center,
                                     double rho, const TiltSchedule& schedule,
                                     long long cap) {
  spec.validate();
  check_cap(spec, cap);
  auto support = initial_support(spec);
  TubeChecker checker(spec, center, rho);
  const long long steps = spec.micro_steps();
  const double init_p = 1.0 / static_cast<double>(support.size());

  std::vector<const TiltedMeasure*> step_law(static_cast<std::size_t>(steps));
  for (long long k = 0; k < steps; ++k) {
    double s = spec.epsilon * static_cast<double>(k);
    step_law[static_cast<std::size_t>(k)] =
        &schedule.laws[static_cast<std::size_t>(schedule_segment(schedule, s))];
  }

  double total = 0;
  std::vector<IVec> states;
  // sum over proposal outcomes of proposal prob * likelihood weight * indicator
  std::function<void(long long, double, double)> rec = [&](long long k,
                                                           double proposal_prob,
                                                           double weight) {
    if (k == steps) {
      if (weight > 0 && checker.inside(states)) total += proposal_prob * weight;
      return;
    }
    const TiltedMeasure& nu = *step_law[static_cast<std::size_t>(k)];
    double s = spec.epsilon * static_cast<double>(k);
    Vec x = position(states.back(), spec.epsilon);
    for (std::size_t j = 0; j < spec.jump_set.size(); ++j) {
      if (nu.prob[j] <= 0) continue;
      double true_p = spec.weight(s, x, static_cast<int>(j), EvalMode::FiniteEps);
      double w = true_p > 0 ? weight * true_p / nu.prob[j] : 0.0;
      IVec g = states.back();
      for (std::size_t c = 0; c < g.size(); ++c) g[c] += spec.jump_set.vectors[j][c];
      states.push_back(std::move(g));
      rec(k + 1, proposal_prob * nu.prob[j], w);
      states.pop_back();
    }
  };
  for (const auto& g0 : support) {
    states.assign(1, g0);
    rec(0, init_p, 1.0);
  }
  return total;
}

CoveringResult covering_count(double rho, double eta, int n, int d,
                              bool explicit_points) {
  if (!(rho > 2 * eta))
    throw ModelError("covering_count: requires rho > 2*eta (got rho = " +
                     std::to_string(rho) + ", eta = " + std::to_string(eta) + ")");
  if (n < 1 || d < 1) throw ModelError("covering_count: need n >= 1 and d >= 1");
  CoveringResult res;
  res.bound = std::exp(static_cast<double>(d) * static_cast<double>(n) *
                       (std::log(rho / eta) + 2.0));
  if (explicit_points) {
    double spacing = eta / std::sqrt(static_cast<double>(d));
    int half = static_cast<int>(std::floor(rho / spacing));
    std::vector<int> idx(static_cast<std::size_t>(d), -half);
    for (;;) {
      Vec x(static_cast<std::size_t>(d));
      double norm2 = 0;
      for (int c = 0; c < d; ++c) {
        x[static_cast<std::size_t>(c)] = idx[static_cast<std::size_t>(c)] * spacing;
        norm2 += x[static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
      }
      if (norm2 <= rho * rho) res.lattice_points.push_back(std::move(x));
      int c = 0;
      while (c < d && ++idx[static_cast<std::size_t>(c)] > half)
        idx[static_cast<std::size_t>(c++)] = -half;
      if (c == d) break;
    }
  }
  return res;
}

} // namespace ldp
