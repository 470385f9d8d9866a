#pragma once

#include <cstddef>
#include <vector>

#include "rjacobi/quadrature.hpp"

namespace rjacobi {

// Coefficients of dX = -theta*(X - mu) dt + gamma*[theta*X(1-X)]^beta dW,
// driven pathwise by an alpha-Holder signal. Validity requires theta > 0,
// mu in (0,1), beta in (1-alpha, 1), alpha in (0,1]; gamma is any finite real.
struct ModelParams {
  double theta = 1.0;
  double mu = 0.5;
  double gamma = 1.0;
  double beta = 0.5;
  double alpha = 0.55;

  void validate() const;  // throws std::invalid_argument naming the field
};

// Tabulated transform y = F(x) = int_0^x [v(1-v)]^{-beta} dv with its
// quadrature rule. F maps [0,1] monotonically onto [0, F1] where
// F1 = F(1) = Beta(1-beta, 1-beta). The table grid is log-dense near both
// endpoints and seeds the safeguarded-Newton inversion.
class TransformTable {
 public:
  explicit TransformTable(double beta, int quad_nodes = 64,
                          std::size_t table_nodes = 4096);

  double beta() const { return beta_; }
  double F1() const { return F1_; }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& Fs() const { return Fs_; }

  // F(x) by reflection + Gauss-Jacobi: for x <= 1/2 the rule integrates the
  // v^{-beta} singularity exactly and samples the smooth (1-v)^{-beta}
  // factor; for x > 1/2, F(x) = F1 - F(1-x) by symmetry of the integrand.
  double F(double x) const;

  // Inverse: table bracket + Newton using F'(x) = [x(1-x)]^{-beta} with a
  // bisection safeguard. Domain [0, F1]; endpoints map exactly (0 -> 0,
  // F1 -> 1). Achieves |F(result) - z| <= 1e-12 whenever some double can;
  // otherwise (z within a few ulps of F1 for beta near 1, where one ulp of x
  // already moves F by more than that) returns the representable candidate
  // with the smallest residual.
  double F_inv(double z) const;

 private:
  double F_half(double x) const;  // direct rule on [0,x], x in [0, 1/2]

  double beta_ = 0.0;
  double F1_ = 0.0;
  QuadRule rule_;            // Gauss-Jacobi (0, -beta) on [-1,1]
  std::vector<double> xs_;   // log-dense grid in (0,1), symmetric
  std::vector<double> Fs_;   // F at xs_
};

// Free-function interface. eval_F builds (and caches per thread) a 64-node
// rule per distinct beta; hot loops should hold a TransformTable instead.
double eval_F(double x, double beta);

// Two-parameter transform F(u,y) = int_0^y [v(1-uv)]^{-beta} dv on the domain
// u in [0,1], y >= 0, u*y <= 1. Scaling identity: F(u,y) = u^{-(1-beta)} *
// F(1, u*y) for u > 0; F(0,y) = y^{1-beta}/(1-beta).
double eval_F2(double u, double y, double beta);

double eval_F_inv(double z, double beta, const TransformTable& table);

// Drift in x-coordinates: G(x) = theta*(mu - x)*[x(1-x)]^{-beta}, x in (0,1).
double eval_G(double x, const ModelParams& params);

// Transformed drift (G o F^{-1})(z), z in (0, F1): strictly decreasing,
// +inf at 0+, -inf at F1-. At beta == 1/2 exactly this uses the arcsine
// closed form (like the step solver); otherwise it composes eval_G with the
// tabulated inverse.
double eval_GoFinv(double z, const ModelParams& params,
                   const TransformTable& table);

// dF/dx = [x(1-x)]^{-beta}.
double eval_dF(double x, double beta);

// r(x) = G'(x)/F'(x) = -theta * [beta*(mu-x)(1-2x)/(x(1-x)) + 1]; this is
// also d/dz (G o F^{-1}) evaluated at z = F(x). Always <= -l below.
double drift_ratio(double x, const ModelParams& params);

// Contraction constant l = inf over x in (0,1) of -r(x) =
// theta * inf [beta*(mu-x)(1-2x)/(x(1-x)) + 1]. Computed by a log-dense grid
// scan refined by golden-section search. Positive for valid parameters;
// throws std::runtime_error if the numerical infimum is <= 0.
double contraction_constant(const ModelParams& params);

}  // namespace rjacobi
