#include "rjacobi/malliavin_density.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "rjacobi/parallel.hpp"
#include "rjacobi/quadrature.hpp"
#include "rjacobi/rng.hpp"

namespace rjacobi {

namespace {

// Quantile of a sorted sample by linear interpolation (type-7, the numpy
// default); q in [0,1].
double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

MalliavinDerivative malliavin_derivative(const SolutionPath& path,
                                         const ModelParams& params, double t) {
  const std::size_t it = path.index_at(t);
  if (it == 0) throw std::invalid_argument("malliavin_derivative: t must be positive");
  const double c = params.gamma * std::pow(params.theta, params.beta);

  // Cumulative integral of the drift ratio r(x_u) from node k to node it,
  // trapezoid rule, accumulated from the right so the last cell is exact.
  std::vector<double> rvals(it + 1);
  for (std::size_t k = 0; k <= it; ++k) rvals[k] = drift_ratio(path.x[k], params);
  const double h = path.times[1] - path.times[0];

  MalliavinDerivative d;
  d.t = path.times[it];
  d.profile.breakpoints.assign(path.times.begin(), path.times.begin() + static_cast<std::ptrdiff_t>(it + 1));
  d.profile.levels.resize(it);

  double integral = 0.0;  // int_{t_k}^{t_it} r(x_u) du, built right-to-left
  // Level on cell [t_k, t_{k+1}) uses the right node t_{k+1}: the last cell
  // carries integral = 0, i.e. level exactly c.
  for (std::size_t k = it; k-- > 0;) {
    d.profile.levels[k] = c * std::exp(integral);
    if (k > 0) integral += 0.5 * h * (rvals[k] + rvals[k + 1]);
  }
  return d;
}

double malliavin_norm(const MalliavinDerivative& d, double H) {
  return h_inner_product(d.profile, d.profile, H);
}

GaussianPath mehler_shift(const GaussianPath& w, const GaussianPath& w_prime,
                          double u) {
  if (u < 0.0) throw std::invalid_argument("mehler_shift: u must be nonnegative");
  if (w.size() != w_prime.size() || w.origin != w_prime.origin ||
      w.dt != w_prime.dt) {
    throw std::invalid_argument("mehler_shift: paths must share the same grid");
  }
  const double a = std::exp(-u);
  const double b = std::sqrt(std::max(0.0, 1.0 - a * a));
  GaussianPath out = w;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    out.values[i] = a * w.values[i] + b * w_prime.values[i];
  }
  out.values[static_cast<std::size_t>(out.origin)] = 0.0;
  out.seed = derive_seed(w.seed, 0x6d65686c);  // distinct label; diagnostic only
  return out;
}

namespace {

// One forward solve from x0 over [0, t] on driver w (one-sided grid),
// returning the path. In plumbing mode the dynamics are y' = c dW exactly.
SolutionPath solve_forward(const ModelParams& params, const TransformTable& table,
                           double t, std::size_t n_time, double x0,
                           const GaussianPath& w, bool drift_enabled) {
  if (drift_enabled) {
    SolverConfig cfg;
    cfg.T = t;
    cfg.n = n_time;
    cfg.params = params;
    return solve_path(w, x0, cfg, table);
  }
  // Pure-noise mode: Y_t = F(x0) + c W_t on the same node set.
  const double c = params.gamma * std::pow(params.theta, params.beta);
  const double y0 = table.F(x0);
  SolutionPath p;
  p.times.resize(n_time + 1);
  p.y.resize(n_time + 1);
  p.x.resize(n_time + 1);
  const double h = t / static_cast<double>(n_time);
  const std::size_t stride = static_cast<std::size_t>(
      std::llround(h / w.dt) > 0 ? std::llround(h / w.dt) : 1);
  for (std::size_t k = 0; k <= n_time; ++k) {
    p.times[k] = static_cast<double>(k) * h;
    const double wk = w.values[static_cast<std::size_t>(w.origin) + k * stride];
    p.y[k] = y0 + c * wk;
    p.x[k] = 0.0;  // not used in plumbing mode
  }
  return p;
}

MalliavinDerivative derivative_of(const SolutionPath& path,
                                  const ModelParams& params, double t,
                                  bool drift_enabled) {
  if (drift_enabled) return malliavin_derivative(path, params, t);
  // Flat profile: D_s Y_t = c for all s in [0, t].
  const double c = params.gamma * std::pow(params.theta, params.beta);
  MalliavinDerivative d;
  d.t = t;
  d.profile.breakpoints = path.times;
  d.profile.levels.assign(path.times.size() - 1, c);
  return d;
}

}  // namespace

DensityEstimate estimate_g(const ModelParams& params, double H, double t,
                           double x0, const DensityGridConfig& grid,
                           const McConfig& mc, std::uint64_t seed,
                           unsigned threads) {
  params.validate();
  if (!(t > 0.0)) throw std::invalid_argument("estimate_g: t must be positive");
  if (!(x0 > 0.0 && x0 < 1.0))
    throw std::invalid_argument("estimate_g: x0 must lie in (0,1)");
  if (grid.n_time < 2 || grid.n_y < 3)
    throw std::invalid_argument("estimate_g: grid too small");
  if (mc.n_outer < 2 || mc.n_inner < 1 || mc.u_nodes < 1)
    throw std::invalid_argument("estimate_g: Monte-Carlo sizes too small");
  if (!(grid.q_lo >= 0.0 && grid.q_lo < grid.q_hi && grid.q_hi <= 1.0))
    throw std::invalid_argument("estimate_g: quantile range invalid");

  TransformTable table(params.beta);
  const std::size_t n_time = grid.n_time;
  const double dt = t / static_cast<double>(n_time);

  // Gauss-Laguerre rule for int_0^inf e^{-u} E[...] du.
  const QuadRule gl = gauss_laguerre(mc.u_nodes);

  // The inner product against the shifted-path derivative reuses the
  // Toeplitz kernel of the uniform solver grid.
  const UniformCellKernel kernel(dt, n_time, H);

  const std::size_t n_outer = mc.n_outer;
  std::vector<double> Y(n_outer);
  std::vector<double> xi(n_outer);  // xi_i = sum_j w_j * avg_k <Phi_i, Phi~_ijk>

  parallel_for(n_outer, threads, [&](std::size_t i) {
    const std::uint64_t s_i = derive_seed(seed, i);
    const GaussianPath w = sample_fbm(t, n_time, H, derive_seed(s_i, 0));
    const SolutionPath path =
        solve_forward(params, table, t, n_time, x0, w, mc.drift_enabled);
    Y[i] = path.y.back();
    const MalliavinDerivative di =
        derivative_of(path, params, t, mc.drift_enabled);

    // Precompute q = K * phi_i once; each inner replica is then a dot
    // product instead of a full Toeplitz multiply.
    const std::vector<double> q = kernel.cross_vector(di.profile.levels);

    double acc = 0.0;
    for (std::size_t j = 0; j < gl.size(); ++j) {
      const double u = gl.nodes[j];
      double inner_mean = 0.0;
      for (std::size_t k = 0; k < mc.n_inner; ++k) {
        const GaussianPath wp =
            sample_fbm(t, n_time, H, derive_seed(s_i, 1 + j * mc.n_inner + k));
        const GaussianPath ws = mehler_shift(w, wp, u);
        const SolutionPath ps =
            solve_forward(params, table, t, n_time, x0, ws, mc.drift_enabled);
        const MalliavinDerivative ds =
            derivative_of(ps, params, t, mc.drift_enabled);
        inner_mean += UniformCellKernel::dot(q, ds.profile.levels);
      }
      inner_mean /= static_cast<double>(mc.n_inner);
      acc += gl.weights[j] * inner_mean;
    }
    xi[i] = acc;
  });

  // Sample statistics of Y_t (fixed-order reductions for determinism).
  double mean_Y = 0.0;
  for (double v : Y) mean_Y += v;
  mean_Y /= static_cast<double>(n_outer);
  double mad = 0.0, var = 0.0;
  for (double v : Y) {
    mad += std::abs(v - mean_Y);
    var += (v - mean_Y) * (v - mean_Y);
  }
  mad /= static_cast<double>(n_outer);
  var /= static_cast<double>(n_outer - 1);
  const double sdev = std::sqrt(var);

  double bw = mc.bandwidth;
  if (bw <= 0.0) {
    bw = 1.06 * sdev * std::pow(static_cast<double>(n_outer), -0.2);
  }

  // y-grid over the empirical quantile range.
  std::vector<double> sorted(Y);
  std::sort(sorted.begin(), sorted.end());
  const double y_lo = quantile_sorted(sorted, grid.q_lo);
  const double y_hi = quantile_sorted(sorted, grid.q_hi);
  if (!(y_hi > y_lo))
    throw std::runtime_error("estimate_g: degenerate Y sample (zero spread)");

  DensityEstimate est;
  est.mean_Y = mean_Y;
  est.mean_abs_dev = mad;
  est.n_outer = n_outer;
  est.n_inner = mc.n_inner;
  est.n_u = mc.u_nodes;
  est.bandwidth = bw;
  est.t = t;
  est.seed = seed;
  est.y_samples = Y;

  // Nadaraya-Watson regression of xi on Y with a Gaussian kernel; nodes
  // whose total kernel mass is negligible are dropped (no support there).
  est.ys.reserve(grid.n_y);
  est.g.reserve(grid.n_y);
  for (std::size_t m = 0; m < grid.n_y; ++m) {
    const double y = y_lo + (y_hi - y_lo) * static_cast<double>(m) /
                                static_cast<double>(grid.n_y - 1);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n_outer; ++i) {
      const double z = (Y[i] - y) / bw;
      const double kv = std::exp(-0.5 * z * z);
      num += kv * xi[i];
      den += kv;
    }
    if (den < 1e-12) continue;
    est.ys.push_back(y);
    est.g.push_back(num / den);
  }
  if (est.ys.size() < 3)
    throw std::runtime_error("estimate_g: fewer than 3 supported grid nodes");
  return est;
}

DensityEstimate nv_density(DensityEstimate est) {
  const std::size_t n = est.ys.size();
  if (n < 3 || est.g.size() != n)
    throw std::invalid_argument("nv_density: estimate lacks a usable g grid");
  for (double gv : est.g) {
    if (!(gv > 0.0))
      throw std::runtime_error("nv_density: g must be positive on the grid");
  }

  // I(y) = int_{mean_Y}^{y} (z - mean_Y) / g(z) dz, trapezoid along the grid
  // outward from mean_Y in both directions.
  const double yc = est.mean_Y;
  auto integrand = [&](std::size_t i) {
    return (est.ys[i] - yc) / est.g[i];
  };
  std::vector<double> I(n, 0.0);
  // Find the cell containing yc (grid is increasing; clamp to range).
  std::size_t ic = 0;
  while (ic + 1 < n && est.ys[ic + 1] < yc) ++ic;
  // Partial cells adjacent to yc first (the integrand vanishes at yc),
  // then propagate outward node by node.
  I[ic] = 0.5 * (est.ys[ic] - yc) * integrand(ic);
  if (ic + 1 < n) I[ic + 1] = 0.5 * (est.ys[ic + 1] - yc) * integrand(ic + 1);
  for (std::size_t i = ic; i-- > 0;) {
    I[i] = I[i + 1] +
           0.5 * (est.ys[i] - est.ys[i + 1]) * (integrand(i) + integrand(i + 1));
  }
  for (std::size_t i = ic + 2; i < n; ++i) {
    I[i] = I[i - 1] +
           0.5 * (est.ys[i] - est.ys[i - 1]) * (integrand(i) + integrand(i - 1));
  }

  est.f.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    est.f[i] = est.mean_abs_dev / (2.0 * est.g[i]) * std::exp(-I[i]);
  }

  // Grid mass by trapezoid; renormalize so the reported density integrates
  // to one over the grid.
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    mass += 0.5 * (est.ys[i + 1] - est.ys[i]) * (est.f[i] + est.f[i + 1]);
  }
  est.mass = mass;
  if (!(mass > 0.0)) throw std::runtime_error("nv_density: nonpositive mass");
  for (double& fv : est.f) fv /= mass;
  return est;
}

XDensity x_density(const DensityEstimate& est, const TransformTable& table) {
  if (est.f.size() != est.ys.size() || est.f.empty())
    throw std::invalid_argument("x_density: estimate has no density grid");
  XDensity out;
  out.xs.resize(est.ys.size());
  out.density.resize(est.ys.size());
  const double beta = table.beta();
  for (std::size_t i = 0; i < est.ys.size(); ++i) {
    const double y = std::clamp(est.ys[i], 0.0, table.F1());
    const double x = table.F_inv(y);
    out.xs[i] = x;
    out.density[i] = est.f[i] * std::pow(x * (1.0 - x), -beta);
  }
  return out;
}

}  // namespace rjacobi
