#include "rjacobi/jacobi_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace rjacobi {

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("beta must lie in (0,1), got " +
                                std::to_string(beta));
  }
}

void check_state_closed(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("x must lie in [0,1], got " + std::to_string(x));
  }
}

}  // namespace

void ModelParams::validate() const {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("params.theta must be positive, got " +
                                std::to_string(theta));
  }
  if (!(mu > 0.0 && mu < 1.0)) {
    throw std::invalid_argument("params.mu must lie in (0,1), got " +
                                std::to_string(mu));
  }
  if (!std::isfinite(gamma)) {
    throw std::invalid_argument("params.gamma must be finite");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("params.alpha must lie in (0,1], got " +
                                std::to_string(alpha));
  }
  if (!(beta > 1.0 - alpha && beta < 1.0)) {
    throw std::invalid_argument(
        "params.beta must lie in (1-alpha, 1), got beta=" +
        std::to_string(beta) + " with alpha=" + std::to_string(alpha));
  }
}

TransformTable::TransformTable(double beta, int quad_nodes,
                               std::size_t table_nodes)
    : beta_(beta) {
  check_beta(beta);
  if (quad_nodes < 4) {
    throw std::invalid_argument("TransformTable: quad_nodes must be >= 4");
  }
  if (table_nodes < 16 || table_nodes % 2 != 0) {
    throw std::invalid_argument(
        "TransformTable: table_nodes must be even and >= 16");
  }
  // Weight (1+xi)^{-beta}: carries the v^{-beta} endpoint singularity after
  // mapping [0,x] onto [-1,1]; the (1-v)^{-beta} factor stays smooth there.
  rule_ = gauss_jacobi(quad_nodes, 0.0, -beta);
  F1_ = 2.0 * F_half(0.5);

  // Symmetric grid, log-dense toward both endpoints: half the nodes run
  // from 1e-14 up to just below 1/2, the rest mirror through x -> 1-x.
  const std::size_t half = table_nodes / 2;
  xs_.resize(table_nodes);
  Fs_.resize(table_nodes);
  const double lo = 1e-14;
  for (std::size_t k = 0; k < half; ++k) {
    double frac = static_cast<double>(k) / static_cast<double>(half);
    double x = 0.5 * std::pow(2.0 * lo, 1.0 - frac);  // lo .. <0.5
    xs_[k] = x;
    xs_[table_nodes - 1 - k] = 1.0 - x;
  }
  for (std::size_t k = 0; k < half; ++k) {
    Fs_[k] = F_half(xs_[k]);
    Fs_[table_nodes - 1 - k] = F1_ - Fs_[k];
  }
}

double TransformTable::F_half(double x) const {
  // Map v = x*(1+xi)/2; then the integral becomes
  //   (x/2)^{1-beta} * sum_i w_i * (1 - x*(1+xi_i)/2)^{-beta}.
  double acc = 0.0;
  for (std::size_t i = 0; i < rule_.size(); ++i) {
    double v = x * 0.5 * (1.0 + rule_.nodes[i]);
    acc += rule_.weights[i] * std::pow(1.0 - v, -beta_);
  }
  return std::pow(0.5 * x, 1.0 - beta_) * acc;
}

double TransformTable::F(double x) const {
  check_state_closed(x);
  if (x == 0.0) return 0.0;
  if (x <= 0.5) return F_half(x);
  return F1_ - F_half(1.0 - x);
}

double TransformTable::F_inv(double z) const {
  if (!(z >= 0.0 && z <= F1_)) {
    throw std::domain_error("F_inv: z must lie in [0, F1], got z=" +
                            std::to_string(z) +
                            " with F1=" + std::to_string(F1_));
  }
  if (z == 0.0) return 0.0;
  if (z == F1_) return 1.0;

  // Bracket from the table (Fs_ strictly increasing).
  auto it = std::lower_bound(Fs_.begin(), Fs_.end(), z);
  double lo_x, hi_x;
  if (it == Fs_.begin()) {
    lo_x = 0.0;
    hi_x = xs_.front();
  } else if (it == Fs_.end()) {
    lo_x = xs_.back();
    hi_x = 1.0;
  } else {
    std::size_t j = static_cast<std::size_t>(it - Fs_.begin());
    lo_x = xs_[j - 1];
    hi_x = xs_[j];
  }

  double x = 0.5 * (lo_x + hi_x);
  // Below the first table node, F(x) ~ x^{1-beta}/(1-beta) seeds better.
  if (it == Fs_.begin()) {
    x = std::pow((1.0 - beta_) * z, 1.0 / (1.0 - beta_));
    x = std::clamp(x, std::numeric_limits<double>::min(), hi_x);
  }

  const double tol = 1e-12;
  double best_x = x;
  double best_resid = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 100; ++iter) {
    double fx = F(x);
    double resid = fx - z;
    if (std::abs(resid) < best_resid) {
      best_resid = std::abs(resid);
      best_x = x;
    }
    if (std::abs(resid) <= tol) return x;
    if (resid > 0.0) {
      hi_x = x;
    } else {
      lo_x = x;
    }
    // Newton step; dF is huge near the endpoints, so the step is tiny and
    // safe there, but fall back to bisection whenever it leaves the bracket.
    double step = resid * std::pow(x * (1.0 - x), beta_);
    double x_new = x - step;
    if (!(x_new > lo_x && x_new < hi_x)) {
      x_new = 0.5 * (lo_x + hi_x);
    }
    x = x_new;
  }
  // tol was not reachable: for beta close to 1 and z within a few ulps of the
  // endpoint values, one ulp of x already moves F by more than tol (F' blows
  // up like [x(1-x)]^{-beta}). The bracket has pinched; return the candidate
  // with the smallest residual seen, which is then within a few ulps of the
  // mathematical preimage.
  return best_x;
}

namespace {

// Per-thread rule cache for the free-function interface.
const TransformTable& cached_table(double beta) {
  thread_local std::map<double, TransformTable> cache;
  auto it = cache.find(beta);
  if (it == cache.end()) {
    it = cache.emplace(beta, TransformTable(beta, 64, 64)).first;
  }
  return it->second;
}

}  // namespace

double eval_F(double x, double beta) {
  check_beta(beta);
  check_state_closed(x);
  return cached_table(beta).F(x);
}

double eval_F2(double u, double y, double beta) {
  check_beta(beta);
  if (!(u >= 0.0 && u <= 1.0)) {
    throw std::domain_error("eval_F2: u must lie in [0,1], got " +
                            std::to_string(u));
  }
  if (!(y >= 0.0)) {
    throw std::domain_error("eval_F2: y must be >= 0, got " +
                            std::to_string(y));
  }
  double uy = u * y;
  if (uy > 1.0 + 1e-12) {
    throw std::domain_error("eval_F2: u*y must be <= 1, got " +
                            std::to_string(uy));
  }
  if (u == 0.0) {
    return std::pow(y, 1.0 - beta) / (1.0 - beta);
  }
  // Substituting v -> v/u: F(u,y) = u^{-(1-beta)} F(1, u*y).
  return std::pow(u, beta - 1.0) * eval_F(std::min(uy, 1.0), beta);
}

double eval_F_inv(double z, double beta, const TransformTable& table) {
  if (table.beta() != beta) {
    throw std::invalid_argument("eval_F_inv: table built for beta=" +
                                std::to_string(table.beta()) +
                                ", called with beta=" + std::to_string(beta));
  }
  return table.F_inv(z);
}

double eval_G(double x, const ModelParams& params) {
  params.validate();
  if (!(x > 0.0 && x < 1.0)) {
    throw std::domain_error("eval_G: x must lie in (0,1), got " +
                            std::to_string(x));
  }
  return params.theta * (params.mu - x) *
         std::pow(x * (1.0 - x), -params.beta);
}

double eval_GoFinv(double z, const ModelParams& params,
                   const TransformTable& table) {
  params.validate();
  if (!(z > 0.0 && z < table.F1())) {
    throw std::domain_error("eval_GoFinv: z must lie in (0, F1), got " +
                            std::to_string(z));
  }
  if (table.beta() == 0.5) {
    // Arcsine closed form (the same specialization the step solver uses).
    // The generic route below caps out near z = F1 because x is a double:
    // one ulp of x moves the drift by |r(x)| * F'(x) * ulp, which exceeds
    // any fixed tolerance close to the endpoint.
    return params.theta * (2.0 * params.mu - 1.0 + std::cos(z)) /
           std::sin(z);
  }
  return eval_G(table.F_inv(z), params);
}

double eval_dF(double x, double beta) {
  check_beta(beta);
  if (!(x > 0.0 && x < 1.0)) {
    throw std::domain_error("eval_dF: x must lie in (0,1), got " +
                            std::to_string(x));
  }
  return std::pow(x * (1.0 - x), -beta);
}

double drift_ratio(double x, const ModelParams& params) {
  if (!(x > 0.0 && x < 1.0)) {
    throw std::domain_error("drift_ratio: x must lie in (0,1), got " +
                            std::to_string(x));
  }
  return -params.theta *
         (params.beta * (params.mu - x) * (1.0 - 2.0 * x) / (x * (1.0 - x)) +
          1.0);
}

double contraction_constant(const ModelParams& params) {
  params.validate();
  // Minimize q(x) = beta*(mu-x)(1-2x)/(x(1-x)) + 1 over (0,1); q -> +inf at
  // both endpoints (numerator beta*mu resp. beta*(1-mu) > 0), so the infimum
  // is interior. Grid scan (log-dense at the ends) then golden-section.
  auto q = [&](double x) {
    return params.beta * (params.mu - x) * (1.0 - 2.0 * x) / (x * (1.0 - x)) +
           1.0;
  };
  const std::size_t half = 2048;
  double best_x = 0.5, best_q = q(0.5);
  for (std::size_t k = 0; k < half; ++k) {
    double frac = static_cast<double>(k) / static_cast<double>(half);
    double x = 0.5 * std::pow(2e-14, 1.0 - frac);
    for (double cand : {x, 1.0 - x}) {
      double val = q(cand);
      if (val < best_q) {
        best_q = val;
        best_x = cand;
      }
    }
  }
  // Golden-section refinement around the grid minimum.
  double a = std::max(best_x * 0.5, 1e-15);
  double b = std::min(0.5 + 0.5 * best_x, 1.0 - 1e-15);
  const double gr = 0.6180339887498949;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double qc = q(c), qd = q(d);
  for (int iter = 0; iter < 200 && (b - a) > 1e-14; ++iter) {
    if (qc < qd) {
      b = d;
      d = c;
      qd = qc;
      c = b - gr * (b - a);
      qc = q(c);
    } else {
      a = c;
      c = d;
      qc = qd;
      d = a + gr * (b - a);
      qd = q(d);
    }
  }
  double l = params.theta * std::min({best_q, qc, qd});
  if (!(l > 0.0)) {
    throw std::runtime_error(
        "contraction_constant: numerical infimum is not positive (l=" +
        std::to_string(l) + "); implementation invariant violated");
  }
  return l;
}

}  // namespace rjacobi
