#include "rjacobi/gaussian_paths.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "rjacobi/rng.hpp"

namespace rjacobi {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Autocovariance of fractional Gaussian noise increments on step h:
//   r(k) = h^{2H} * ((k+1)^{2H} + |k-1|^{2H} - 2 k^{2H}) / 2.
std::vector<double> fgn_autocov(std::size_t n, double H, double h) {
  std::vector<double> r(n + 1);
  double scale = std::pow(h, 2.0 * H);
  for (std::size_t k = 0; k <= n; ++k) {
    double kd = static_cast<double>(k);
    r[k] = 0.5 * scale *
           (std::pow(kd + 1.0, 2.0 * H) + std::pow(std::abs(kd - 1.0), 2.0 * H) -
            2.0 * std::pow(kd, 2.0 * H));
  }
  return r;
}

// One unnormalized forward DFT of a complex vector, in place.
void fft_forward(std::vector<std::complex<double>>& a) {
  fftw_plan plan = fftw_plan_dft_1d(
      static_cast<int>(a.size()), reinterpret_cast<fftw_complex*>(a.data()),
      reinterpret_cast<fftw_complex*>(a.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

// Davies-Harte fractional Gaussian noise: n increments on step h.
// Returns false if the circulant embedding is indefinite beyond tolerance
// (caller falls back to the dense sampler).
bool fgn_davies_harte(std::size_t n, double H, double h, GaussianRng& rng,
                      std::vector<double>& out) {
  const std::size_t m = 2 * n;
  std::vector<double> r = fgn_autocov(n, H, h);

  // First row of the circulant embedding: r_0..r_{n-1}, r_n, r_{n-1}..r_1.
  std::vector<std::complex<double>> c(m);
  for (std::size_t k = 0; k < n; ++k) c[k] = r[k];
  c[n] = r[n];
  for (std::size_t k = 1; k < n; ++k) c[m - k] = r[k];
  fft_forward(c);

  std::vector<double> lambda(m);
  double lam_max = 0.0, lam_min = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    lambda[k] = c[k].real();
    lam_max = std::max(lam_max, lambda[k]);
    lam_min = std::min(lam_min, lambda[k]);
  }
  if (lam_min < -1e-10 * lam_max) return false;
  for (double& l : lambda) l = std::max(l, 0.0);

  // Hermitian-symmetric Gaussian spectrum. Draw order is part of the
  // determinism contract: Z(a_0), Z(a_n), then pairs (A_k, B_k), k=1..n-1.
  std::vector<std::complex<double>> a(m);
  const double md = static_cast<double>(m);
  a[0] = std::sqrt(lambda[0] / md) * rng.normal();
  a[n] = std::sqrt(lambda[n] / md) * rng.normal();
  for (std::size_t k = 1; k < n; ++k) {
    double s = std::sqrt(lambda[k] / (2.0 * md));
    double re = s * rng.normal();
    double im = s * rng.normal();
    a[k] = {re, im};
    a[m - k] = {re, -im};
  }
  fft_forward(a);

  out.resize(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k].real();
  return true;
}

GaussianPath path_from_increments(const std::vector<double>& dw, double dt,
                                  double H, std::uint64_t seed) {
  GaussianPath p;
  p.dt = dt;
  p.origin = 0;
  p.hurst = H;
  p.seed = seed;
  p.values.resize(dw.size() + 1);
  p.values[0] = 0.0;
  for (std::size_t k = 0; k < dw.size(); ++k) {
    p.values[k + 1] = p.values[k] + dw[k];
  }
  return p;
}

void check_sample_args(double T, std::size_t n, double H) {
  require(T > 0.0, "sample_fbm: T must be positive, got " + std::to_string(T));
  require(n >= 2, "sample_fbm: n must be >= 2, got " + std::to_string(n));
  require(H > 0.0 && H < 1.0,
          "sample_fbm: H must lie in (0,1), got " + std::to_string(H));
}

}  // namespace

std::ptrdiff_t GaussianPath::index_at(double t) const {
  double pos = t / dt + static_cast<double>(origin);
  double nearest = std::round(pos);
  if (std::abs(pos - nearest) > 1e-9 * std::max(1.0, std::abs(pos)) ||
      nearest < 0.0 || nearest >= static_cast<double>(values.size())) {
    throw std::domain_error("GaussianPath: time " + std::to_string(t) +
                            " is not a grid node");
  }
  return static_cast<std::ptrdiff_t>(nearest);
}

void GaussianPath::validate() const {
  require(dt > 0.0, "GaussianPath: dt must be positive");
  require(values.size() >= 2, "GaussianPath: need at least 2 nodes");
  require(origin >= 0 && origin < static_cast<std::ptrdiff_t>(values.size()),
          "GaussianPath: origin out of range");
  require(values[static_cast<std::size_t>(origin)] == 0.0,
          "GaussianPath: value at time 0 must be exactly 0");
}

double StepFunction::operator()(double t) const {
  if (breakpoints.empty() || t < breakpoints.front() || t >= breakpoints.back()) {
    return 0.0;
  }
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  std::size_t cell = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
  if (cell >= levels.size()) return 0.0;
  return levels[cell];
}

void StepFunction::validate() const {
  require(breakpoints.size() >= 2, "StepFunction: need at least 2 breakpoints");
  require(levels.size() + 1 == breakpoints.size(),
          "StepFunction: levels must have breakpoints.size()-1 entries");
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    require(breakpoints[k] < breakpoints[k + 1],
            "StepFunction: breakpoints must be strictly increasing");
  }
}

double fbm_covariance(double s, double t, double H) {
  if (!(H > 0.0 && H < 1.0)) {
    throw std::domain_error("fbm_covariance: H must lie in (0,1), got " +
                            std::to_string(H));
  }
  if (s < 0.0 || t < 0.0) {
    throw std::domain_error("fbm_covariance: times must be >= 0, got s=" +
                            std::to_string(s) + ", t=" + std::to_string(t));
  }
  return 0.5 * (std::pow(s, 2.0 * H) + std::pow(t, 2.0 * H) -
                std::pow(std::abs(t - s), 2.0 * H));
}

GaussianPath sample_fbm(double T, std::size_t n, double H, std::uint64_t seed) {
  check_sample_args(T, n, H);
  GaussianRng rng(seed);
  std::vector<double> dw;
  if (!fgn_davies_harte(n, H, T / static_cast<double>(n), rng, dw)) {
    return sample_fbm_dense(T, n, H, seed);
  }
  return path_from_increments(dw, T / static_cast<double>(n), H, seed);
}

GaussianPath sample_fbm_dense(double T, std::size_t n, double H,
                              std::uint64_t seed) {
  check_sample_args(T, n, H);
  if (n > 4096) {
    throw std::runtime_error(
        "sample_fbm_dense: n capped at 4096 (O(n^3) factorization), got " +
        std::to_string(n));
  }
  const double h = T / static_cast<double>(n);
  const auto nd = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd R(nd, nd);
  for (Eigen::Index i = 0; i < nd; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double c = fbm_covariance((i + 1) * h, (j + 1) * h, H);
      R(i, j) = c;
      R(j, i) = c;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success) {
    // The covariance is positive definite in exact arithmetic; a tiny ridge
    // absorbs roundoff for poorly conditioned (large n, H near 1) cases.
    R.diagonal().array() += 1e-12 * R.diagonal().maxCoeff();
    llt.compute(R);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("sample_fbm_dense: Cholesky failed");
    }
  }
  GaussianRng rng(seed);
  Eigen::VectorXd z(nd);
  for (Eigen::Index i = 0; i < nd; ++i) z(i) = rng.normal();
  Eigen::VectorXd w = llt.matrixL() * z;

  GaussianPath p;
  p.dt = h;
  p.origin = 0;
  p.hurst = H;
  p.seed = seed;
  p.values.resize(n + 1);
  p.values[0] = 0.0;
  for (std::size_t k = 1; k <= n; ++k) p.values[k] = w(static_cast<Eigen::Index>(k - 1));
  return p;
}

GaussianPath sample_two_sided_grid(std::size_t n_left, std::size_t n_right,
                                   double dt, double H, std::uint64_t seed) {
  require(dt > 0.0, "sample_two_sided_grid: dt must be positive");
  require(n_left >= 1 && n_right >= 1,
          "sample_two_sided_grid: need nodes on both sides of 0");
  const std::size_t n = n_left + n_right;
  double span = dt * static_cast<double>(n);
  GaussianPath base = sample_fbm(span, n, H, seed);
  // Re-pin at the node that becomes time 0 (stationary increments); the
  // pivot node itself lands on exactly 0.
  double pivot = base.values[n_left];
  for (double& v : base.values) v -= pivot;
  base.origin = static_cast<std::ptrdiff_t>(n_left);
  return base;
}

GaussianPath sample_two_sided_fbm(double S, double T, std::size_t n_per_unit,
                                  double H, std::uint64_t seed) {
  require(S > 0.0 && T > 0.0,
          "sample_two_sided_fbm: S and T must be positive, got S=" +
              std::to_string(S) + ", T=" + std::to_string(T));
  require(n_per_unit >= 1, "sample_two_sided_fbm: n_per_unit must be >= 1");
  double dt = 1.0 / static_cast<double>(n_per_unit);
  auto n_left = static_cast<std::size_t>(
      std::ceil(S * static_cast<double>(n_per_unit) - 1e-9));
  auto n_right = static_cast<std::size_t>(
      std::ceil(T * static_cast<double>(n_per_unit) - 1e-9));
  return sample_two_sided_grid(std::max<std::size_t>(n_left, 1),
                               std::max<std::size_t>(n_right, 1), dt, H, seed);
}

GaussianPath wiener_shift(const GaussianPath& path, double t) {
  path.validate();
  std::ptrdiff_t k = path.index_at(t);  // throws if off-grid
  GaussianPath out = path;
  double wt = path.values[static_cast<std::size_t>(k)];
  for (double& v : out.values) v -= wt;
  out.values[static_cast<std::size_t>(k)] = 0.0;
  out.origin = k;
  return out;
}

GaussianPath forward_restriction(const GaussianPath& path, double T) {
  path.validate();
  std::ptrdiff_t last = path.index_at(T);
  require(last > path.origin, "forward_restriction: T must be after time 0");
  GaussianPath out;
  out.dt = path.dt;
  out.origin = 0;
  out.hurst = path.hurst;
  out.seed = path.seed;
  out.values.assign(path.values.begin() + path.origin,
                    path.values.begin() + last + 1);
  return out;
}

namespace {

// <1_[a,b], 1_[c,d]> in the H-kernel: exact rectangle antiderivative.
double cell_ip(double a, double b, double c, double d, double twoH) {
  return 0.5 * (std::pow(std::abs(b - c), twoH) + std::pow(std::abs(a - d), twoH) -
                std::pow(std::abs(b - d), twoH) - std::pow(std::abs(a - c), twoH));
}

}  // namespace

double h_inner_product(const StepFunction& phi, const StepFunction& psi,
                       double H) {
  if (H < 0.5) {
    throw std::invalid_argument(
        "h_inner_product: H < 1/2 is unsupported, got " + std::to_string(H));
  }
  if (!(H < 1.0)) {
    throw std::invalid_argument("h_inner_product: H must be < 1, got " +
                                std::to_string(H));
  }
  phi.validate();
  psi.validate();
  const double twoH = 2.0 * H;
  double total = 0.0;
  for (std::size_t k = 0; k < phi.levels.size(); ++k) {
    if (phi.levels[k] == 0.0) continue;
    double a = phi.breakpoints[k], b = phi.breakpoints[k + 1];
    for (std::size_t l = 0; l < psi.levels.size(); ++l) {
      if (psi.levels[l] == 0.0) continue;
      double c = psi.breakpoints[l], d = psi.breakpoints[l + 1];
      total += phi.levels[k] * psi.levels[l] * cell_ip(a, b, c, d, twoH);
    }
  }
  return total;
}

UniformCellKernel::UniformCellKernel(double h, std::size_t n_cells, double H)
    : n_(n_cells) {
  if (H < 0.5 || !(H < 1.0)) {
    throw std::invalid_argument(
        "UniformCellKernel: H must lie in [1/2,1), got " + std::to_string(H));
  }
  if (!(h > 0.0) || n_cells == 0) {
    throw std::invalid_argument("UniformCellKernel: need h > 0 and n_cells >= 1");
  }
  const double twoH = 2.0 * H;
  double scale = std::pow(h, twoH);
  kappa_.resize(n_cells);
  for (std::size_t d = 0; d < n_cells; ++d) {
    double dd = static_cast<double>(d);
    kappa_[d] = 0.5 * scale *
                (std::pow(dd + 1.0, twoH) + std::pow(std::abs(dd - 1.0), twoH) -
                 2.0 * std::pow(dd, twoH));
  }
}

std::vector<double> UniformCellKernel::cross_vector(
    const std::vector<double>& phi) const {
  if (phi.size() != n_) {
    throw std::invalid_argument("UniformCellKernel: level count mismatch");
  }
  std::vector<double> q(n_, 0.0);
  for (std::size_t l = 0; l < n_; ++l) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t d = (k >= l) ? k - l : l - k;
      acc += phi[k] * kappa_[d];
    }
    q[l] = acc;
  }
  return q;
}

double UniformCellKernel::ip(const std::vector<double>& phi,
                             const std::vector<double>& psi) const {
  return dot(cross_vector(phi), psi);
}

double UniformCellKernel::dot(const std::vector<double>& q,
                              const std::vector<double>& psi) {
  if (q.size() != psi.size()) {
    throw std::invalid_argument("UniformCellKernel: level count mismatch");
  }
  double acc = 0.0;
  for (std::size_t l = 0; l < q.size(); ++l) acc += q[l] * psi[l];
  return acc;
}

double holder_norm(const GaussianPath& path, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("holder_norm: alpha must lie in (0,1], got " +
                                std::to_string(alpha));
  }
  path.validate();
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    for (std::size_t j = i + 1; j < path.size(); ++j) {
      double num = std::abs(path.values[j] - path.values[i]);
      double den = std::pow(static_cast<double>(j - i) * path.dt, alpha);
      best = std::max(best, num / den);
    }
  }
  return best;
}

}  // namespace rjacobi
