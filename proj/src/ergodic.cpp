#include "rjacobi/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rjacobi/parallel.hpp"
#include "rjacobi/rng.hpp"

namespace rjacobi {

namespace {

// Steps per pullback depth unit: the smallest integer number of grid steps
// covering at least one time unit, so restart times stay on the grid and
// the unit u = spu*dt is >= 1 (keeping the e^{-l(n-1)} gap bound valid).
std::size_t steps_per_unit(double dt) {
  return static_cast<std::size_t>(std::ceil(1.0 / dt - 1e-9));
}

// Solve forward over the grid nodes [origin - depth*spu, origin] starting
// from x_start; returns the state at time 0. The driver grid itself is the
// solver grid (h = dt).
double pullback_run(const GaussianPath& w, const ModelParams& p,
                    const TransformTable& table, std::size_t depth,
                    std::size_t spu, double x_start, double root_tol) {
  const double h = w.dt;
  const double c = p.gamma * std::pow(p.theta, p.beta);
  const std::size_t origin = static_cast<std::size_t>(w.origin);
  const std::size_t start = origin - depth * spu;
  double y = table.F(x_start);
  double x_prev = x_start;
  for (std::size_t idx = start; idx < origin; ++idx) {
    double dw = w.values[idx + 1] - w.values[idx];
    detail::StepResult res = detail::step_root(y + c * dw, h, p.theta, p.mu,
                                               table, root_tol, x_prev);
    y = res.y;
    x_prev = res.x;
  }
  return y;
}

}  // namespace

ErgodicEstimate pullback_fixed_point(const GaussianPath& w,
                                     const ModelParams& params,
                                     const TransformTable& table,
                                     std::size_t n_max, double tol,
                                     double root_tol) {
  params.validate();
  w.validate();
  if (table.beta() != params.beta) {
    throw std::invalid_argument("pullback_fixed_point: table beta mismatch");
  }
  if (n_max < 1) {
    throw std::invalid_argument("pullback_fixed_point: n_max must be >= 1");
  }
  if (tol < 0.0) {
    throw std::invalid_argument("pullback_fixed_point: tol must be >= 0");
  }
  const std::size_t spu = steps_per_unit(w.dt);
  if (static_cast<std::size_t>(w.origin) < n_max * spu) {
    throw std::invalid_argument(
        "pullback_fixed_point: driver covers only " +
        std::to_string(static_cast<double>(w.origin) * w.dt) +
        " time units of past, need " +
        std::to_string(static_cast<double>(n_max * spu) * w.dt));
  }

  const double anchor_x = table.F_inv(table.F1() / 2.0);
  ErgodicEstimate est;
  est.unit_time = static_cast<double>(spu) * w.dt;

  double z_prev = 0.0;
  for (std::size_t depth = 1; depth <= n_max; ++depth) {
    double z = pullback_run(w, params, table, depth, spu, anchor_x, root_tol);
    if (depth >= 2) {
      est.cauchy_gap = std::abs(z - z_prev);
      est.gaps.push_back(est.cauchy_gap);
    }
    est.y_hat = z;
    est.n_pullback = depth;
    z_prev = z;
    if (tol > 0.0 && depth >= 2 && est.cauchy_gap <= tol) {
      est.converged = true;
      break;
    }
  }
  est.x_hat = table.F_inv(est.y_hat);

  // Anchor independence: rerun the final depth from a different start.
  const double alt_x = table.F_inv(table.F1() / 4.0);
  double z_alt = pullback_run(w, params, table, est.n_pullback, spu, alt_x,
                              root_tol);
  est.anchor_mismatch = std::abs(z_alt - est.y_hat);
  return est;
}

TimeAverageSeries time_average(const SolutionPath& path,
                               const std::function<double(double)>& f) {
  if (path.times.empty()) {
    throw std::invalid_argument("time_average: empty path");
  }
  TimeAverageSeries s;
  s.times = path.times;
  s.values.resize(path.times.size());
  s.values[0] = f(path.x[0]);
  double integral = 0.0;
  double f_prev = s.values[0];
  for (std::size_t k = 1; k < path.times.size(); ++k) {
    double f_k = f(path.x[k]);
    integral += 0.5 * (f_prev + f_k) * (path.times[k] - path.times[k - 1]);
    s.values[k] = integral / path.times[k];
    f_prev = f_k;
  }
  return s;
}

EnsembleReport ergodic_estimate_ensemble(
    const ModelParams& params, double H,
    const std::function<double(double)>& f, double T, std::size_t n,
    std::size_t n_paths, std::size_t pullback_depth, std::uint64_t seed,
    double root_tol, unsigned threads) {
  params.validate();
  if (n_paths < 2) {
    throw std::invalid_argument(
        "ergodic_estimate_ensemble: n_paths must be >= 2");
  }
  if (pullback_depth < 1) {
    throw std::invalid_argument(
        "ergodic_estimate_ensemble: pullback_depth must be >= 1");
  }
  TransformTable table(params.beta);
  const double dt = T / static_cast<double>(n);
  const std::size_t spu = steps_per_unit(dt);
  const std::size_t n_left = pullback_depth * spu;
  const double anchor_x = table.F_inv(table.F1() / 2.0);

  std::vector<double> s_T(n_paths), x_T(n_paths), x_hat(n_paths),
      f_hat(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    GaussianPath w =
        sample_two_sided_grid(n_left, n, dt, H, derive_seed(seed, i));
    ErgodicEstimate est =
        pullback_fixed_point(w, params, table, pullback_depth, 0.0, root_tol);
    SolutionPath sol =
        solve_path(w, anchor_x, {T, n, root_tol, params}, table);
    TimeAverageSeries series = time_average(sol, f);
    s_T[i] = series.values.back();
    x_T[i] = sol.x.back();
    x_hat[i] = est.x_hat;
    f_hat[i] = f(est.x_hat);
  });

  auto mean_of = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / static_cast<double>(v.size());
  };
  auto se_of = [](const std::vector<double>& v, double m) {
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    double var = ss / static_cast<double>(v.size() - 1);
    return std::sqrt(var / static_cast<double>(v.size()));
  };

  EnsembleReport rep;
  rep.n_paths = n_paths;
  rep.time_avg_mean = mean_of(s_T);
  rep.fixed_point_mean = mean_of(f_hat);
  rep.diff = rep.time_avg_mean - rep.fixed_point_mean;
  rep.se_time_avg = se_of(s_T, rep.time_avg_mean);
  rep.se_fixed_point = se_of(f_hat, rep.fixed_point_mean);
  rep.se = std::sqrt(rep.se_time_avg * rep.se_time_avg +
                     rep.se_fixed_point * rep.se_fixed_point);
  rep.wasserstein1 = wasserstein1(x_T, x_hat);
  return rep;
}

ContractionDiagnostic contraction_diagnostic(const GaussianPath& w,
                                             const ModelParams& params,
                                             std::pair<double, double> x0_pair,
                                             const TransformTable& table,
                                             double root_tol) {
  if (x0_pair.first == x0_pair.second) {
    throw std::invalid_argument(
        "contraction_diagnostic: initial states must differ");
  }
  w.validate();
  const double T = w.t_end();
  const std::size_t n = w.size() - 1 - static_cast<std::size_t>(w.origin);
  SolverConfig cfg{T, n, root_tol, params};
  SolutionPath a = solve_path(w, x0_pair.first, cfg, table);
  SolutionPath b = solve_path(w, x0_pair.second, cfg, table);

  ContractionDiagnostic diag;
  diag.times = a.times;
  diag.distances.resize(a.y.size());
  const double merge_eps = 1e-14 * table.F1();
  for (std::size_t k = 0; k < a.y.size(); ++k) {
    diag.distances[k] = std::abs(a.y[k] - b.y[k]);
    if (!diag.merged && k > 0 && diag.distances[k] <= merge_eps) {
      diag.merged = true;
      diag.merge_time = a.times[k];
    }
  }
  // Fit log-distance vs time on the pre-merge window only; after merging,
  // distances sit at the floating-point floor and would corrupt the fit.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t k = 0; k < diag.distances.size(); ++k) {
    if (diag.distances[k] <= 10.0 * merge_eps) break;
    double lx = diag.times[k];
    double ly = std::log(diag.distances[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m >= 2) {
    double md = static_cast<double>(m);
    diag.slope = (md * sxy - sx * sy) / (md * sxx - sx * sx);
  }
  return diag;
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument(
        "wasserstein1: need two equal-size nonempty samples");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

}  // namespace rjacobi
