// Command-line front end: rate, action, minpath, simulate, ldp-check.
#include "ldp/action.hpp"
#include "ldp/config.hpp"
#include "ldp/simulate.hpp"
#include "ldp/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

constexpr const char* kVersion = "0.1.0";

// exit codes: 0 ok, 2 validation, 3 numerical failure, 4 cap/budget exceeded
constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kNumerical = 3;
constexpr int kCap = 4;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_vec(const ldp::Vec& v, char sep = ';') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += fmt(v[i]);
  }
  return out;
}

ldp::Vec parse_list(const std::string& text) {
  ldp::Vec out;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    if (cell.empty()) continue;
    out.push_back(std::stod(cell));
  }
  if (out.empty()) throw ldp::ConfigError("empty numeric list: " + text);
  return out;
}

ldp::EvalMode parse_mode(const std::string& mode) {
  if (mode == "finite") return ldp::EvalMode::FiniteEps;
  if (mode == "limit") return ldp::EvalMode::Limit;
  throw ldp::ConfigError("unknown mode: " + mode + " (want finite|limit)");
}

int default_threads() {
  if (const char* env = std::getenv("LDP_THREADS")) {
    int t = std::atoi(env);
    if (t >= 1) return t;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

std::vector<std::string> provenance(const std::string& command,
                                    const std::string& model_path,
                                    std::uint64_t seed, bool with_seed) {
  std::vector<std::string> lines;
  lines.push_back("command=" + command);
  lines.push_back("version=" + std::string(kVersion));
  if (!model_path.empty()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(ldp::file_hash(model_path)));
    lines.push_back("config-hash=" + std::string(buf));
  }
  if (with_seed) lines.push_back("seed=" + std::to_string(seed));
  return lines;
}

void emit(const std::string& out_file, const std::vector<std::string>& comments,
          const std::string& header, const std::vector<std::string>& rows) {
  std::ostringstream text;
  for (const auto& c : comments) text << "# " << c << "\n";
  text << header << "\n";
  for (const auto& r : rows) text << r << "\n";
  if (out_file.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream f(out_file);
    if (!f) throw ldp::ConfigError("cannot write output file: " + out_file);
    f << text.str();
  }
}

struct Args {
  std::string model;
  std::string mode = "limit";
  std::string out;
  double eps_override = -1;

  std::string at;       // rate
  std::string vstar;    // rate

  std::string path_file;  // action
  int bisections = 0;

  std::string from, to;  // minpath
  int segments = 8;

  long long n = 10000;  // simulate
  std::uint64_t seed = 42;
  std::string tube;
  double rho = 0.1;
  std::string tilt;
  int threads = default_threads();
  bool timing = false;
  std::string traj_out;

  std::string center;   // ldp-check
  std::string eps_list;
  double budget = 100000;
  std::string plot_data;
  bool direct_only = false;
};

ldp::ChainSpec load_model(const Args& a) {
  if (a.model.empty()) throw ldp::ConfigError("--model is required");
  std::optional<double> over;
  if (a.eps_override > 0) over = a.eps_override;
  auto spec = ldp::load_model_config(a.model, over);
  spec.validate();
  return spec;
}

int cmd_rate(const Args& a) {
  auto spec = load_model(a);
  ldp::Vec at = parse_list(a.at);
  if (static_cast<int>(at.size()) != spec.dimension() + 1)
    throw ldp::ConfigError("--at needs s followed by " +
                           std::to_string(spec.dimension()) + " coordinates");
  double s = at[0];
  ldp::Vec u(at.begin() + 1, at.end());
  ldp::Vec vstar = parse_list(a.vstar);
  if (static_cast<int>(vstar.size()) != spec.dimension())
    throw ldp::ConfigError("--vstar dimension mismatch");

  auto lp = ldp::legendre_transform(spec, parse_mode(a.mode), s, u, vstar);
  std::string flag = lp.flag == ldp::BoundaryFlag::Interior ? "interior"
                     : lp.flag == ldp::BoundaryFlag::RelBoundary
                         ? "relative-boundary"
                         : "outside-domain";
  std::string row = fmt(lp.value) + "," + fmt_vec(lp.dual) + "," + flag + "," +
                    fmt(lp.grad_residual) + "," + std::to_string(lp.iterations);
  emit(a.out, provenance("rate", a.model, 0, false),
       "value,dual,boundary_flag,grad_residual,iterations", {row});
  return kOk;
}

int cmd_action(const Args& a) {
  auto spec = load_model(a);
  auto path = ldp::read_path_csv(a.path_file);
  if (path.dimension() != spec.dimension())
    throw ldp::ConfigError("path dimension does not match the model");
  auto cls = ldp::admissibility(path, spec);
  ldp::QuadratureOptions q;
  q.max_bisections = a.bisections;
  auto val = ldp::action(path, spec, parse_mode(a.mode), q);
  std::string row = fmt(val.value) + "," + cls.label() + "," + fmt(val.error_bound) +
                    "," + std::to_string(val.bisections);
  emit(a.out, provenance("action", a.model, 0, false),
       "action,classification,error_bound,bisections", {row});
  return kOk;
}

int cmd_minpath(const Args& a) {
  auto spec = load_model(a);
  ldp::Vec from = parse_list(a.from);
  ldp::Vec to = parse_list(a.to);
  if (static_cast<int>(from.size()) != spec.dimension() ||
      static_cast<int>(to.size()) != spec.dimension())
    throw ldp::ConfigError("--from/--to dimension mismatch");
  auto res = ldp::minimize_action(spec, from, to, a.segments, parse_mode(a.mode));
  auto comments = provenance("minpath", a.model, 0, false);
  comments.push_back("action=" + fmt(res.action.value));
  comments.push_back("converged=" + std::string(res.converged ? "yes" : "no"));
  if (!a.out.empty()) {
    ldp::write_path_csv(a.out, res.path, comments);
  } else {
    std::cout << ldp::format_path_csv(res.path, comments);
  }
  return kOk;
}

int cmd_simulate(const Args& a) {
  auto spec = load_model(a);
  auto comments = provenance("simulate", a.model, a.seed, true);

  if (a.tube.empty()) {
    // no tube: dump one trajectory
    auto traj = ldp::sample_chain(spec, a.seed);
    std::vector<std::string> rows;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      std::string row = std::to_string(k);
      for (long long g : traj.states[k])
        row += "," + fmt(spec.epsilon * static_cast<double>(g));
      rows.push_back(std::move(row));
    }
    std::string header = "k";
    for (int c = 1; c <= spec.dimension(); ++c) header += ",x" + std::to_string(c);
    emit(a.traj_out.empty() ? a.out : a.traj_out, comments, header, rows);
    return kOk;
  }

  auto center = ldp::read_path_csv(a.tube);
  if (center.dimension() != spec.dimension())
    throw ldp::ConfigError("tube center dimension does not match the model");
  ldp::McOptions mc;
  mc.threads = a.threads;

  auto t0 = std::chrono::steady_clock::now();
  ldp::TubeEstimate est;
  if (!a.tilt.empty()) {
    auto reference = ldp::read_path_csv(a.tilt);
    auto sched = ldp::make_tilt_schedule(spec, reference);
    est = ldp::tube_probability_tilted(spec, center, a.rho, sched, a.n, a.seed, mc);
  } else {
    est = ldp::tube_probability_mc(spec, center, a.rho, a.n, a.seed, mc);
  }
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();

  std::string header = "estimator,p_hat,stderr,ci_lo,ci_hi,n,ess";
  std::string row = est.estimator + "," + fmt(est.p_hat) + "," + fmt(est.stderr_) +
                    "," + fmt(est.ci_lo) + "," + fmt(est.ci_hi) + "," +
                    std::to_string(est.n_samples) + "," + fmt(est.ess);
  if (a.timing) {
    // wall time is opt-in so default output stays byte-identical across runs
    header += ",wall_seconds";
    row += "," + fmt(wall);
  }
  emit(a.out, comments, header, {row});
  return kOk;
}

int cmd_ldp_check(const Args& a) {
  if (a.model.empty()) throw ldp::ConfigError("--model is required");
  auto center = ldp::read_path_csv(a.center);
  ldp::Vec eps_values = parse_list(a.eps_list);

  ldp::SpecFamily family = [&](double eps) {
    auto spec = ldp::load_model_config(a.model, eps);
    spec.validate();
    return spec;
  };
  ldp::SweepOptions opt;
  opt.seed = a.seed;
  opt.mc.threads = a.threads;
  opt.force_direct = a.direct_only;
  auto report = ldp::ldp_sweep(family, std::vector<double>(eps_values.begin(),
                                                           eps_values.end()),
                               center, a.rho,
                               static_cast<long long>(a.budget), opt);

  std::vector<std::string> rows;
  for (const auto& r : report.rows) {
    rows.push_back(fmt(r.epsilon) + "," + r.estimator + "," + fmt(r.p_hat) + "," +
                   fmt(r.stderr_) + "," +
                   (r.p_zero ? std::string("inf") : fmt(r.neg_eps_log_p)) + "," +
                   fmt(r.i_ball) + "," +
                   (r.gap_defined ? fmt(r.gap) : std::string("undefined")));
  }
  auto comments = provenance("ldp-check", a.model, a.seed, true);
  comments.push_back("rho=" + fmt(a.rho));
  comments.push_back("budget=" + std::to_string(static_cast<long long>(a.budget)));
  emit(a.out, comments, "epsilon,estimator,p_hat,stderr,neg_eps_log_p,i_ball,gap",
       rows);

  if (!a.plot_data.empty()) {
    std::ofstream tsv(a.plot_data);
    if (!tsv) throw ldp::ConfigError("cannot write plot data: " + a.plot_data);
    tsv << "epsilon\tneg_eps_log_p\ti_ball\n";
    for (const auto& r : report.rows)
      tsv << fmt(r.epsilon) << '\t'
          << (r.p_zero ? std::string("inf") : fmt(r.neg_eps_log_p)) << '\t'
          << fmt(r.i_ball) << '\n';
  }
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sample-path large deviations for lattice Markov chains"};
  app.require_subcommand(1);
  Args a;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--model", a.model, "model config (JSON)");
    cmd->add_option("--mode", a.mode, "finite|limit");
    cmd->add_option("--out", a.out, "output file (default stdout)");
    cmd->add_option("--epsilon", a.eps_override, "override the config epsilon");
  };

  auto* rate = app.add_subcommand("rate", "Legendre transform L*(s,u,v*)");
  add_common(rate);
  rate->add_option("--at", a.at, "s,u1,...,ud")->required();
  rate->add_option("--vstar", a.vstar, "v*_1,...,v*_d")->required();

  auto* action_cmd = app.add_subcommand("action", "action of a path CSV");
  add_common(action_cmd);
  action_cmd->add_option("--path", a.path_file, "path CSV (t,x1,...,xd)")->required();
  action_cmd->add_option("--bisections", a.bisections, "max quadrature bisections");

  auto* minpath = app.add_subcommand("minpath", "minimize the action between points");
  add_common(minpath);
  minpath->add_option("--from", a.from, "start point")->required();
  minpath->add_option("--to", a.to, "end point")->required();
  minpath->add_option("--segments", a.segments, "number of path segments");

  auto* simulate = app.add_subcommand("simulate", "sample chains / estimate tubes");
  add_common(simulate);
  simulate->add_option("--n", a.n, "number of samples");
  simulate->add_option("--seed", a.seed, "RNG seed");
  simulate->add_option("--tube", a.tube, "tube center path CSV");
  simulate->add_option("--rho", a.rho, "tube radius");
  simulate->add_option("--tilt", a.tilt, "tilt reference path CSV");
  simulate->add_option("--threads", a.threads, "worker threads");
  simulate->add_option("--traj-out", a.traj_out, "trajectory dump file");
  simulate->add_flag("--timing", a.timing, "append a wall-time column");

  auto* check = app.add_subcommand("ldp-check", "epsilon sweep vs ball infimum");
  add_common(check);
  check->add_option("--center", a.center, "tube center path CSV")->required();
  check->add_option("--rho", a.rho, "tube radius");
  check->add_option("--eps", a.eps_list, "comma list of epsilon values")->required();
  check->add_option("--budget", a.budget, "MC samples per row");
  check->add_option("--seed", a.seed, "RNG seed");
  check->add_option("--threads", a.threads, "worker threads");
  check->add_option("--plot-data", a.plot_data, "TSV output for plotting");
  check->add_flag("--direct", a.direct_only, "force the direct estimator");

  CLI11_PARSE(app, argc, argv);

  try {
    if (rate->parsed()) return cmd_rate(a);
    if (action_cmd->parsed()) return cmd_action(a);
    if (minpath->parsed()) return cmd_minpath(a);
    if (simulate->parsed()) return cmd_simulate(a);
    if (check->parsed()) return cmd_ldp_check(a);
  } catch (const ldp::CapError& e) {
    std::cerr << "error code=4 msg=\"" << e.what() << "\"\n";
    return kCap;
  } catch (const ldp::NumericalError& e) {
    std::cerr << "error code=3 msg=\"" << e.what() << "\"\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error code=2 msg=\"" << e.what() << "\"\n";
    return kValidation;
  }
  return kOk;
}
