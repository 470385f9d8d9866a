#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "rjacobi/euler_solver.hpp"
#include "rjacobi/gaussian_paths.hpp"
#include "rjacobi/jacobi_transform.hpp"

namespace rjacobi {

// Result of the pullback iteration: the scheme is restarted ever deeper in
// the past from a fixed anchor and evaluated at time 0; contraction makes
// the sequence Cauchy with gap(n) <= F1 * exp(-l*(n-1)).
struct ErgodicEstimate {
  double y_hat = 0.0;        // pullback limit in y-coordinates
  double x_hat = 0.0;        // F^{-1}(y_hat)
  std::size_t n_pullback = 0;  // depth actually used
  double cauchy_gap = 0.0;   // |z_n - z_{n-1}| at the final depth
  bool converged = false;    // gap dropped below tol before n_max
  std::vector<double> gaps;  // gap at every depth >= 2 visited
  double anchor_mismatch = 0.0;  // final-depth difference from a 2nd anchor
  double unit_time = 0.0;    // length of one pullback depth unit (>= 1)
};

struct TimeAverageSeries {
  std::vector<double> times;
  std::vector<double> values;  // S_t = (1/t) int_0^t f(x_s) ds, S_0 = f(x_0)
};

// Comparison of the two ergodic estimators over an ensemble of drivers.
struct EnsembleReport {
  double time_avg_mean = 0.0;    // mean over paths of S_T
  double fixed_point_mean = 0.0; // mean over paths of f(x_hat)
  double diff = 0.0;             // time_avg_mean - fixed_point_mean
  double se_time_avg = 0.0;
  double se_fixed_point = 0.0;
  double se = 0.0;               // combined: sqrt(se_ta^2 + se_fp^2)
  double wasserstein1 = 0.0;     // W1 between {x_T} and {x_hat} samples
  std::size_t n_paths = 0;
};

struct ContractionDiagnostic {
  double slope = 0.0;       // fitted d/dt log|y1-y2| over the pre-merge window
  bool merged = false;      // paths reached floating-point coincidence
  double merge_time = 0.0;  // first time |y1-y2| <= 1e-14*F1 (if merged)
  std::vector<double> times;
  std::vector<double> distances;  // |y1-y2| per node
};

// Pullback approximation of the random fixed point. Depth j restarts the
// solver at time -j*u from the anchor x = F^{-1}(F1/2), where the unit
// u = ceil(1/dt)*dt >= 1 keeps restart times on the driver grid. Stops when
// the successive gap drops below tol (tol = 0 forces full depth n_max).
// The driver must cover [-n_max*u, 0]. A second anchor (x = F^{-1}(F1/4))
// is rerun at the final depth; the discrepancy is recorded as
// anchor_mismatch (anchor independence of the limit).
ErgodicEstimate pullback_fixed_point(const GaussianPath& w,
                                     const ModelParams& params,
                                     const TransformTable& table,
                                     std::size_t n_max, double tol,
                                     double root_tol = 1e-12);

// Running trapezoidal average of f along the x-path.
TimeAverageSeries time_average(const SolutionPath& path,
                               const std::function<double(double)>& f);

// Ensemble comparison of (a) the time average S_T of f over [0,T] and
// (b) f at the pullback fixed point, on n_paths independent two-sided
// drivers (per-path seeds derive_seed(seed, i)); forward solves start at
// the pullback anchor state. `threads` caps worker threads (0 or 1 =
// serial); results are bitwise independent of the thread count.
EnsembleReport ergodic_estimate_ensemble(
    const ModelParams& params, double H,
    const std::function<double(double)>& f, double T, std::size_t n,
    std::size_t n_paths, std::size_t pullback_depth, std::uint64_t seed,
    double root_tol = 1e-12, unsigned threads = 1);

// Runs two solves from x0_pair on the same driver and fits the decay rate
// of log|y_t^1 - y_t^2|; nodes after floating-point merging are excluded
// from the fit and reported via merged/merge_time.
ContractionDiagnostic contraction_diagnostic(const GaussianPath& w,
                                             const ModelParams& params,
                                             std::pair<double, double> x0_pair,
                                             const TransformTable& table,
                                             double root_tol = 1e-12);

// Exact W1 between two empirical measures with equal sample counts:
// mean |sorted(a) - sorted(b)|.
double wasserstein1(std::vector<double> a, std::vector<double> b);

}  // namespace rjacobi
