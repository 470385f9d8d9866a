#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rjacobi/euler_solver.hpp"
#include "rjacobi/gaussian_paths.hpp"
#include "rjacobi/jacobi_transform.hpp"

namespace rjacobi {

// Sensitivity profile s -> D_s Y_t of the transformed state to a driver
// perturbation at time s: D_s Y_t = gamma*theta^beta * exp(int_s^t r(x_u) du)
// with r = G'/F' < 0, discretized on the solver cells. The level on cell
// [t_k, t_{k+1}) uses the right node's cumulative integral, so the last cell
// is exactly gamma*theta^beta and the sandwich
//   gamma*theta^beta * e^{int_0^t r} <= D_s Y_t <= gamma*theta^beta
// holds nodewise by construction.
struct MalliavinDerivative {
  double t = 0.0;
  StepFunction profile;  // breakpoints = solver nodes on [0, t]
};

struct DensityGridConfig {
  std::size_t n_time = 128;  // solver steps on [0, t] per sampled path
  std::size_t n_y = 101;     // y-grid nodes
  double q_lo = 0.01;        // grid spans the empirical [q_lo, q_hi]
  double q_hi = 0.99;        //   quantile range of the Y_t sample
};

struct McConfig {
  std::size_t n_outer = 2000;  // outer Monte-Carlo paths
  std::size_t n_inner = 8;     // replicas per OU-time quadrature node
  std::size_t u_nodes = 8;     // Gauss-Laguerre nodes for the OU integral
  double bandwidth = 0.0;      // kernel bandwidth; 0 = Silverman rule
  bool drift_enabled = true;   // false = pure-noise plumbing mode
};

struct DensityEstimate {
  std::vector<double> ys;  // y-grid (supported nodes only)
  std::vector<double> g;   // conditional-expectation estimate g(y)
  std::vector<double> f;   // normalized density on ys (after nv_density)
  double mean_Y = 0.0;
  double mean_abs_dev = 0.0;  // E|Y - E Y|
  std::size_t n_outer = 0, n_inner = 0, n_u = 0;
  double bandwidth = 0.0;
  double mass = 0.0;  // raw integral of f before renormalization
  double t = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> y_samples;  // outer-path Y_t draws (for tests/plots)
};

struct XDensity {
  std::vector<double> xs;
  std::vector<double> density;
};

// Builds the derivative profile from a solved path at node time t.
MalliavinDerivative malliavin_derivative(const SolutionPath& path,
                                         const ModelParams& params, double t);

// ||D Y_t||^2 in the H-kernel space (the quantity the density bounds use).
double malliavin_norm(const MalliavinDerivative& d, double H);

// Ornstein-Uhlenbeck semigroup action on the driver via the Mehler
// representation: e^{-u} w + sqrt(1 - e^{-2u}) w'. Grids must match.
GaussianPath mehler_shift(const GaussianPath& w, const GaussianPath& w_prime,
                          double u);

// Monte-Carlo estimator of g(y) = E[<DY_t, -DL^{-1}Y_t> | Y_t = y]:
// outer paths give (Y_t, DY_t); the OU integral over u is Gauss-Laguerre;
// each u-node averages inner products against derivatives recomputed on
// Mehler-shifted paths; Nadaraya-Watson regression conditions on Y_t.
// Seeds: outer path i draws from derive_seed(s_i, 0) with
// s_i = derive_seed(seed, i); the inner replica (j,k) from
// derive_seed(s_i, 1 + j*n_inner + k). With mc.drift_enabled = false the
// dynamics degenerate to Y_t = F(x0) + gamma*theta^beta*W_t and the profile
// is flat (plumbing mode: the exact answer is the Gaussian variance).
DensityEstimate estimate_g(const ModelParams& params, double H, double t,
                           double x0, const DensityGridConfig& grid,
                           const McConfig& mc, std::uint64_t seed,
                           unsigned threads = 1);

// Fills f from g by the exp-integral formula
//   f(y) = mean_abs_dev / (2 g(y)) * exp(-int_{mean_Y}^y (z-mean_Y)/g(z) dz)
// (trapezoid from mean_Y along the grid), then renormalizes to unit mass
// over the grid, recording the raw mass.
DensityEstimate nv_density(DensityEstimate est);

// Transfer to x-coordinates: density(x) = f(F(x)) * [x(1-x)]^{-beta} at
// x = F^{-1}(y) for each grid node.
XDensity x_density(const DensityEstimate& est, const TransformTable& table);

}  // namespace rjacobi
