#include "rjacobi/euler_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rjacobi/rng.hpp"

namespace rjacobi {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;
// Smallest/largest x the root iteration may visit: 1-x must stay
// representable, so the right gap is floored well above one ulp of 1.
constexpr double kXMin = 1e-300;
const double kXMax = 1.0 - 0x1p-50;

}  // namespace

void SolverConfig::validate() const {
  if (!(T > 0.0)) {
    throw std::invalid_argument("config.T must be positive, got " +
                                std::to_string(T));
  }
  if (n < 1) {
    throw std::invalid_argument("config.n must be >= 1");
  }
  if (!(root_tol > 0.0)) {
    throw std::invalid_argument("config.root_tol must be positive, got " +
                                std::to_string(root_tol));
  }
  params.validate();
}

double SolutionPath::y_at(double t) const {
  if (times.empty()) throw std::domain_error("SolutionPath: empty path");
  if (t < times.front() - 1e-12 || t > times.back() + 1e-12) {
    throw std::domain_error("SolutionPath: time " + std::to_string(t) +
                            " outside [" + std::to_string(times.front()) +
                            ", " + std::to_string(times.back()) + "]");
  }
  t = std::clamp(t, times.front(), times.back());
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return y.front();
  if (it == times.end()) return y.back();
  std::size_t k = static_cast<std::size_t>(it - times.begin()) - 1;
  double w1 = (t - times[k]) / (times[k + 1] - times[k]);
  return (1.0 - w1) * y[k] + w1 * y[k + 1];
}

double SolutionPath::x_at(double t, const TransformTable& table) const {
  return table.F_inv(y_at(t));
}

std::size_t SolutionPath::index_at(double t) const {
  if (times.size() < 2) throw std::domain_error("SolutionPath: empty path");
  double h = times[1] - times[0];
  double pos = (t - times[0]) / h;
  double nearest = std::round(pos);
  if (std::abs(pos - nearest) > 1e-9 * std::max(1.0, std::abs(pos)) ||
      nearest < 0.0 || nearest >= static_cast<double>(times.size())) {
    throw std::domain_error("SolutionPath: time " + std::to_string(t) +
                            " is not a grid node");
  }
  return static_cast<std::size_t>(nearest);
}

namespace detail {

namespace {

// beta = 1/2 closed forms: F(x) = pi/2 + arcsin(2x-1), F1 = pi,
// F^{-1}(y) = (1 - cos y)/2, and
// (G o F^{-1})(y) = theta * (2mu - 1 + cos y)/sin y on (0, pi).
StepResult step_root_arcsine(double A, double h, double theta, double mu,
                             double root_tol, double x_guess) {
  const double tol = root_tol * (1.0 + std::abs(A));
  double blo = 0.0, bhi = kPi;
  double xg = std::clamp(x_guess, kXMin, kXMax);
  double y = kPi / 2.0 + std::asin(2.0 * xg - 1.0);
  y = std::clamp(y, 1e-12, kPi - 1e-12);

  for (int iter = 0; iter < 200; ++iter) {
    double sy = std::sin(y), cy = std::cos(y);
    double g = theta * (2.0 * mu - 1.0 + cy) / sy;
    double phi = y - h * g - A;
    if (std::abs(phi) <= tol) {
      return {y, 0.5 * (1.0 - cy)};
    }
    if (phi > 0.0) {
      bhi = y;
    } else {
      blo = y;
    }
    // g'(y) = -theta*(1 + (2mu-1)cos y)/sin^2 y <= -l < 0, so phi' > 1.
    double dphi =
        1.0 + h * theta * (1.0 + (2.0 * mu - 1.0) * cy) / (sy * sy);
    double y_new = y - phi / dphi;
    if (!(y_new > blo && y_new < bhi)) {
      y_new = 0.5 * (blo + bhi);
    }
    if (y_new == y) {  // bracket pinched to one representable value
      return {y, 0.5 * (1.0 - cy)};
    }
    y = y_new;
  }
  throw std::runtime_error(
      "implicit_step: root iteration failed to converge (closed-form path)");
}

}  // namespace

StepResult step_root(double A, double h, double theta, double mu,
                     const TransformTable& table, double root_tol,
                     double x_guess, bool force_general) {
  if (table.beta() == 0.5 && !force_general) {
    return step_root_arcsine(A, h, theta, mu, root_tol, x_guess);
  }
  const double beta = table.beta();
  const double tol = root_tol * (1.0 + std::abs(A));
  double blo = 0.0, bhi = 1.0;
  double x = std::clamp(x_guess, kXMin, kXMax);

  for (int iter = 0; iter < 200; ++iter) {
    double fx = table.F(x);
    double pw = std::pow(x * (1.0 - x), -beta);  // F'(x)
    double G = theta * (mu - x) * pw;
    double psi = fx - h * G - A;
    if (std::abs(psi) <= tol) {
      return {fx, x};
    }
    if (psi > 0.0) {
      bhi = x;
    } else {
      blo = x;
    }
    // psi' = F' * (1 - h*r), r = G'/F' <= -l < 0, hence psi' >= F' > 0.
    double r = -theta *
               (beta * (mu - x) * (1.0 - 2.0 * x) / (x * (1.0 - x)) + 1.0);
    double dpsi = pw * (1.0 - h * r);
    double x_new = x - psi / dpsi;
    if (!(x_new > blo && x_new < bhi)) {
      x_new = 0.5 * (blo + bhi);
    }
    x_new = std::clamp(x_new, kXMin, kXMax);
    if (x_new == x) {
      return {fx, x};
    }
    x = x_new;
  }
  throw std::runtime_error(
      "implicit_step: root iteration failed to converge (general path)");
}

}  // namespace detail

double implicit_step(double y_k, double dw, double h,
                     const ModelParams& params, const TransformTable& table,
                     double root_tol) {
  params.validate();
  if (table.beta() != params.beta) {
    throw std::invalid_argument("implicit_step: table beta mismatch");
  }
  if (!(h > 0.0)) {
    throw std::invalid_argument("implicit_step: h must be positive");
  }
  if (!(y_k > 0.0 && y_k < table.F1())) {
    throw std::domain_error("implicit_step: y_k must lie in (0, F1), got " +
                            std::to_string(y_k));
  }
  double c = params.gamma * std::pow(params.theta, params.beta);
  double A = y_k + c * dw;
  double z_seed = std::clamp(A, table.F1() * 1e-9, table.F1() * (1.0 - 1e-9));
  double x_guess = table.F_inv(z_seed);
  return detail::step_root(A, h, params.theta, params.mu, table, root_tol,
                           x_guess)
      .y;
}

namespace {

// Driver node index stride for a solver grid of step h on path w; the
// driver grid must refine the solver grid exactly.
std::size_t driver_stride(const GaussianPath& w, double h, std::size_t n) {
  double ratio = h / w.dt;
  double nearest = std::round(ratio);
  if (nearest < 1.0 || std::abs(ratio - nearest) > 1e-6) {
    throw std::invalid_argument(
        "solve_path: driver grid (dt=" + std::to_string(w.dt) +
        ") does not refine the solver grid (h=" + std::to_string(h) + ")");
  }
  auto stride = static_cast<std::size_t>(nearest);
  std::size_t needed = static_cast<std::size_t>(w.origin) + n * stride;
  if (needed >= w.size()) {
    throw std::invalid_argument(
        "solve_path: driver path too short for the requested horizon");
  }
  return stride;
}

}  // namespace

SolutionPath solve_path(const GaussianPath& w, double x0,
                        const SolverConfig& config,
                        const TransformTable& table) {
  config.validate();
  w.validate();
  if (!(x0 > 0.0 && x0 < 1.0)) {
    throw std::invalid_argument("solve_path: x0 must lie in (0,1), got " +
                                std::to_string(x0));
  }
  if (table.beta() != config.params.beta) {
    throw std::invalid_argument("solve_path: table beta mismatch");
  }
  const double h = config.T / static_cast<double>(config.n);
  const std::size_t stride = driver_stride(w, h, config.n);
  const std::size_t base = static_cast<std::size_t>(w.origin);
  const ModelParams& p = config.params;
  const double c = p.gamma * std::pow(p.theta, p.beta);

  SolutionPath sol;
  sol.times.resize(config.n + 1);
  sol.y.resize(config.n + 1);
  sol.x.resize(config.n + 1);
  sol.times[0] = 0.0;
  sol.x[0] = x0;
  sol.y[0] = table.F(x0);

  double y_prev = sol.y[0];
  double x_prev = x0;
  for (std::size_t k = 0; k < config.n; ++k) {
    double dw =
        w.values[base + (k + 1) * stride] - w.values[base + k * stride];
    double A = y_prev + c * dw;
    detail::StepResult res;
    try {
      res = detail::step_root(A, h, p.theta, p.mu, table, config.root_tol,
                              x_prev);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("solve_path: step " + std::to_string(k + 1) +
                               ": " + e.what());
    }
    y_prev = res.y;
    x_prev = res.x;
    sol.times[k + 1] = static_cast<double>(k + 1) * h;
    sol.y[k + 1] = res.y;
    sol.x[k + 1] = res.x;
  }
  return sol;
}

namespace {

void fit_loglog(RateReport& report) {
  // Least squares of log(err) on log(n), skipping exact zeros (the
  // self-comparison n = n_ref produces error 0).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < report.ns.size(); ++i) {
    if (report.sup_errors[i] <= 0.0) continue;
    double lx = std::log(static_cast<double>(report.ns[i]));
    double ly = std::log(report.sup_errors[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m >= 2) {
    double md = static_cast<double>(m);
    report.slope = (md * sxy - sx * sy) / (md * sxx - sx * sx);
    report.intercept = (sy - report.slope * sx) / md;
  }
}

double sup_error_vs_ref(const SolutionPath& sol, const SolutionPath& ref,
                        std::size_t stride) {
  double err = 0.0;
  for (std::size_t k = 0; k < sol.x.size(); ++k) {
    err = std::max(err, std::abs(sol.x[k] - ref.x[k * stride]));
  }
  return err;
}

void check_divisible(const std::vector<std::size_t>& n_list,
                     std::size_t n_ref) {
  for (std::size_t n : n_list) {
    if (n == 0 || n_ref % n != 0) {
      throw std::invalid_argument(
          "convergence_study: n_ref=" + std::to_string(n_ref) +
          " is not a multiple of n=" + std::to_string(n));
    }
  }
}

}  // namespace

RateReport convergence_study(const GaussianPath& w_fine, double x0,
                             const ModelParams& params,
                             const std::vector<std::size_t>& n_list,
                             std::size_t n_ref, double root_tol) {
  check_divisible(n_list, n_ref);
  w_fine.validate();
  if (w_fine.origin != 0) {
    throw std::invalid_argument(
        "convergence_study: driver must start at time 0");
  }
  const double T = w_fine.t_end();
  TransformTable table(params.beta);
  SolutionPath ref =
      solve_path(w_fine, x0, {T, n_ref, root_tol, params}, table);

  RateReport report;
  report.ns = n_list;
  report.sup_errors.resize(n_list.size());
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    SolutionPath sol =
        solve_path(w_fine, x0, {T, n_list[i], root_tol, params}, table);
    report.sup_errors[i] = sup_error_vs_ref(sol, ref, n_ref / n_list[i]);
  }
  fit_loglog(report);
  return report;
}

RateReport convergence_study_ensemble(double T, double H, double x0,
                                      const ModelParams& params,
                                      const std::vector<std::size_t>& n_list,
                                      std::size_t n_ref, double p,
                                      std::size_t n_seeds, std::uint64_t seed,
                                      double root_tol) {
  check_divisible(n_list, n_ref);
  if (!(p >= 1.0)) {
    throw std::invalid_argument("convergence_study_ensemble: p must be >= 1");
  }
  if (n_seeds == 0) {
    throw std::invalid_argument(
        "convergence_study_ensemble: n_seeds must be >= 1");
  }
  TransformTable table(params.beta);
  std::vector<double> acc(n_list.size(), 0.0);
  for (std::size_t i = 0; i < n_seeds; ++i) {
    GaussianPath w = sample_fbm(T, n_ref, H, derive_seed(seed, i));
    SolutionPath ref =
        solve_path(w, x0, {T, n_ref, root_tol, params}, table);
    for (std::size_t j = 0; j < n_list.size(); ++j) {
      SolutionPath sol =
          solve_path(w, x0, {T, n_list[j], root_tol, params}, table);
      acc[j] += std::pow(sup_error_vs_ref(sol, ref, n_ref / n_list[j]), p);
    }
  }
  RateReport report;
  report.ns = n_list;
  report.sup_errors.resize(n_list.size());
  for (std::size_t j = 0; j < n_list.size(); ++j) {
    report.sup_errors[j] =
        std::pow(acc[j] / static_cast<double>(n_seeds), 1.0 / p);
  }
  fit_loglog(report);
  return report;
}

}  // namespace rjacobi
