#pragma once

#include <cstddef>
#include <vector>

#include "rjacobi/gaussian_paths.hpp"
#include "rjacobi/jacobi_transform.hpp"

namespace rjacobi {

struct SolverConfig {
  double T = 1.0;           // horizon
  std::size_t n = 1;        // step count (uniform grid t_k = k*T/n)
  double root_tol = 1e-12;  // per-step residual tolerance (scaled by 1+|A|)
  ModelParams params;

  void validate() const;
};

// Output of the implicit scheme: y_k in the transformed coordinates (always
// inside (0, F1)) and x_k = F^{-1}(y_k) (inside (0,1)). The interpolation
// convention is piecewise-linear in y; x off-grid goes through F^{-1}.
struct SolutionPath {
  std::vector<double> times;
  std::vector<double> y;
  std::vector<double> x;

  double y_at(double t) const;  // piecewise-linear in y
  double x_at(double t, const TransformTable& table) const;
  std::size_t index_at(double t) const;  // exact node lookup
};

namespace detail {

// One backward-Euler root solve, shared by the base solver and the
// frozen-coefficient neuron stepper. Solves for x in (0,1):
//   psi(x) = F(x) - h*G(x) = A,   G(x) = theta*(mu-x)*[x(1-x)]^{-beta},
// equivalent to the y-equation y - h*(G o F^{-1})(y) = A at y = F(x):
// the y-residual phi(F(x)) equals psi(x) - A identically. psi is strictly
// increasing (psi' = F'*(1 - h*r) with r <= -l < 0), diverges to -inf/+inf
// at the endpoints, so the root exists, is unique, and is found by
// safeguarded Newton from a warm start. For beta == 1/2 exactly, the
// arcsine closed forms replace the quadrature (same residual contract).
struct StepResult {
  double y = 0.0;
  double x = 0.0;
};
StepResult step_root(double A, double h, double theta, double mu,
                     const TransformTable& table, double root_tol,
                     double x_guess, bool force_general = false);

}  // namespace detail

// One step of the implicit scheme: given y_k, increment dw over a step of
// size h, returns the unique y_{k+1} in (0, F1) solving
//   y_{k+1} = y_k + h*(G o F^{-1})(y_{k+1}) + gamma*theta^beta*dw,
// with residual |phi(y_{k+1})| <= root_tol*(1+|A|).
double implicit_step(double y_k, double dw, double h,
                     const ModelParams& params, const TransformTable& table,
                     double root_tol = 1e-12);

// Full path solve on the driver's grid restricted to [0, T]: y_0 = F(x0),
// increments taken between solver nodes (the driver may be a refinement).
SolutionPath solve_path(const GaussianPath& w, double x0,
                        const SolverConfig& config, const TransformTable& table);

// Convergence harness: solves at each n in n_list plus the reference n_ref
// on the same driver (coarse increments are sums of fine ones, so every
// level sees the same signal) and reports sup-node errors in x plus the
// fitted log-log slope.
struct RateReport {
  std::vector<std::size_t> ns;
  std::vector<double> sup_errors;
  double slope = 0.0;
  double intercept = 0.0;
};

RateReport convergence_study(const GaussianPath& w_fine, double x0,
                             const ModelParams& params,
                             const std::vector<std::size_t>& n_list,
                             std::size_t n_ref, double root_tol = 1e-12);

// Ensemble variant: error_n = (mean over seeds of sup-error^p)^(1/p) with
// fresh fBm drivers per seed (derive_seed(seed, i)), T and H given.
RateReport convergence_study_ensemble(double T, double H, double x0,
                                      const ModelParams& params,
                                      const std::vector<std::size_t>& n_list,
                                      std::size_t n_ref, double p,
                                      std::size_t n_seeds, std::uint64_t seed,
                                      double root_tol = 1e-12);

}  // namespace rjacobi
