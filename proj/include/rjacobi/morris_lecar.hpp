#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rjacobi/jacobi_transform.hpp"

namespace rjacobi {

// Morris-Lecar conductance model with the potassium gating fraction driven
// by rough channel noise. Voltage follows the usual current balance; the
// gate X follows the bounded diffusion dX = -theta(V)(X - mu(V)) dt +
// c_diff(V) [X(1-X)]^beta dW with fBm forcing of Hurst index H.
struct MLParams {
  double C = 20.0;     // membrane capacitance
  double g_Ca = 4.4, g_K = 8.0, g_L = 2.0;    // max conductances
  double V_Ca = 120.0, V_K = -84.0, V_L = -60.0;  // reversal potentials
  double V1 = -1.2, V2 = 18.0;  // calcium activation: location / steepness
  double V3 = 2.0, V4 = 30.0;   // potassium activation: location / steepness
  double phi = 0.04;            // gate rate scale
  double I = 60.0;              // applied current
  double sigma_star = 0.1;      // channel-noise amplitude, in [0, 1)
  double beta = 0.5;            // noise exponent, must exceed 1 - H
  double H = 0.6;               // Hurst index of the channel-noise driver

  void validate() const;  // throws std::invalid_argument naming the field
};

// Voltage-dependent gate rates: opening a(v), closing b(v), calcium
// activation m_inf(v), and the stationary open fraction h_gate = a/(a+b).
struct RateFunctions {
  double a = 0.0;
  double b = 0.0;
  double m_inf = 0.0;
  double h_gate = 0.0;
};
RateFunctions rate_functions(const MLParams& p, double v);

// Coefficients of the equivalent bounded diffusion at a frozen voltage:
// theta = a+b (relaxation rate), mu = a/(a+b) (stationary mean),
// gamma = sigma_star * [2ab/(a+b)^2]^beta (Jacobi-form amplitude), and
// c_diff = gamma * theta^beta (the factor multiplying [x(1-x)]^beta dW,
// computed with the exact expression the path solver uses).
struct EffectiveParams {
  double theta = 0.0;
  double mu = 0.0;
  double gamma = 0.0;
  double c_diff = 0.0;
};
EffectiveParams effective_jacobi_params(const MLParams& p, double v);

// Full parameter pack for the standalone gate equation at frozen voltage v;
// the Holder exponent is the midpoint ((1-beta) + H)/2, which is admissible
// because validate() enforces beta > 1 - H.
ModelParams effective_model_params(const MLParams& p, double v);

struct NeuronTrajectory {
  std::vector<double> times;
  std::vector<double> V;
  std::vector<double> X;
};

// Splitting scheme on a uniform n-step grid covering [0, T]: each step first
// advances the gate by one implicit step with coefficients frozen at V_k,
// then advances the voltage explicitly with the updated gate,
//   V_{k+1} = V_k + h * (I - g_Ca m_inf(V_k)(V_k - V_Ca)
//                          - g_K X_{k+1}(V_k - V_K) - g_L(V_k - V_L)) / C.
// The driver is fBm(H) sampled from `seed`; sigma_star = 0 runs the
// deterministic limit on the same code path. Preconditions: T > 0, n >= 2,
// x0 in (0,1), v0 in [-70, 30].
NeuronTrajectory simulate_ml(const MLParams& p, double T, std::size_t n,
                             double x0, double v0, std::uint64_t seed,
                             double root_tol = 1e-12);

}  // namespace rjacobi
