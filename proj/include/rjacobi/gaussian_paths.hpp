#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rjacobi {

// A Gaussian signal sampled on a uniform grid. Two-sided paths are supported
// by letting `origin` point at the node whose time is exactly 0; time of node
// i is (i - origin)*dt, so the zero node is always representable exactly.
// Invariants: values.size() >= 2, dt > 0, 0 <= origin < values.size(),
// values[origin] == 0 (the driver is pinned at time zero).
struct GaussianPath {
  double dt = 0.0;
  std::ptrdiff_t origin = 0;       // index of the node at time 0
  std::vector<double> values;      // signal value at each node
  double hurst = 0.5;              // Hurst index used to sample (provenance)
  std::uint64_t seed = 0;          // seed used to sample (provenance)

  std::size_t size() const { return values.size(); }
  double time(std::size_t i) const {
    return (static_cast<double>(static_cast<std::ptrdiff_t>(i) - origin)) * dt;
  }
  double t0() const { return time(0); }
  double t_end() const { return time(values.size() - 1); }

  // Index of the node at time t; throws std::domain_error if t is off-grid
  // (relative tolerance 1e-9 on the grid position).
  std::ptrdiff_t index_at(double t) const;

  void validate() const;  // throws std::invalid_argument on broken invariants
};

// Piecewise-constant function on [breakpoints.front(), breakpoints.back()):
// value levels[k] on [breakpoints[k], breakpoints[k+1]). Breakpoints are
// strictly increasing and levels.size() == breakpoints.size()-1.
struct StepFunction {
  std::vector<double> breakpoints;
  std::vector<double> levels;

  double operator()(double t) const;  // 0 outside the support
  void validate() const;
};

// Covariance of fractional Brownian motion:
//   R_H(s,t) = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2,  s,t >= 0.
double fbm_covariance(double s, double t, double H);

// Exact-in-law fBm on {k*T/n : k=0..n}. Circulant embedding (Davies-Harte)
// of the increment covariance: one length-2n FFT gives the spectrum, a second
// maps Gaussian coefficients with Hermitian symmetry to the n increments.
// Falls back to dense Cholesky when the embedding has eigenvalues below
// -1e-10*max (does not occur for fGn in practice). Deterministic per seed.
GaussianPath sample_fbm(double T, std::size_t n, double H, std::uint64_t seed);

// Reference sampler: dense covariance + Cholesky, O(n^3), n <= 4096.
// Draws its normals in node order, so paths differ from sample_fbm for the
// same seed; used as an independent oracle and as the embedding fallback.
GaussianPath sample_fbm_dense(double T, std::size_t n, double H,
                              std::uint64_t seed);

// Two-sided fBm on [-S, T] with grid step 1/n_per_unit, pinned to 0 at time 0.
// Sampled as one fBm on [0, S+T] and re-pinned at the node nearest S from
// above (stationary increments make the law exact).
GaussianPath sample_two_sided_fbm(double S, double T, std::size_t n_per_unit,
                                  double H, std::uint64_t seed);

// Internal engine behind sample_two_sided_fbm, exposed because ensemble
// drivers need backward spans on an arbitrary forward grid step dt:
// n_left nodes before time 0, n_right after, pinned at 0.
GaussianPath sample_two_sided_grid(std::size_t n_left, std::size_t n_right,
                                   double dt, double H, std::uint64_t seed);

// Shift map: (shifted path)(s) = w(t+s) - w(t). t must be a grid node; the
// result keeps every sampled node (times shift by -t). Identity at t=0 and
// composes additively over nodes.
GaussianPath wiener_shift(const GaussianPath& path, double t);

// Restriction of a (possibly two-sided) path to the nodes of [0, T],
// re-indexed to start at its time-0 node. T must lie on the grid.
GaussianPath forward_restriction(const GaussianPath& path, double T);

// Inner product of step functions in the reproducing-kernel space of fBm,
// H in [1/2, 1): for H = 1/2 the L^2 product, for H > 1/2
//   H(2H-1) * integral |t-s|^{2H-2} phi(s) psi(t) ds dt,
// computed cell-by-cell from the exact rectangle antiderivative
//   <1_[a,b], 1_[c,d]> = (|b-c|^{2H} + |a-d|^{2H} - |b-d|^{2H} - |a-c|^{2H})/2
// (one formula covers both cases). Throws std::invalid_argument for H < 1/2
// (unsupported) or H >= 1.
double h_inner_product(const StepFunction& phi, const StepFunction& psi,
                       double H);

// Fast path for many inner products of step functions living on one shared
// uniform grid of n cells of width h: the cell Gram matrix is Toeplitz,
//   kappa(d) = h^{2H} * (|d+1|^{2H} + |d-1|^{2H} - 2|d|^{2H}) / 2,
// so <phi,psi> = sum_{k,l} phi_k psi_l kappa(k-l). Values agree with
// h_inner_product to roundoff.
class UniformCellKernel {
 public:
  UniformCellKernel(double h, std::size_t n_cells, double H);

  // q_l = sum_k phi_k kappa(k-l); precompute per fixed phi, then each
  // inner product against psi is a plain dot product.
  std::vector<double> cross_vector(const std::vector<double>& phi) const;
  double ip(const std::vector<double>& phi,
            const std::vector<double>& psi) const;
  static double dot(const std::vector<double>& q,
                    const std::vector<double>& psi);

 private:
  std::vector<double> kappa_;  // kappa(d) for d = 0..n_cells-1 (symmetric)
  std::size_t n_;
};

// Discrete Holder-quotient proxy: max over node pairs of
// |w(v)-w(u)| / |v-u|^alpha, alpha in (0,1]. O(n^2).
double holder_norm(const GaussianPath& path, double alpha);

}  // namespace rjacobi
