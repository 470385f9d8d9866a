#include "rjacobi/morris_lecar.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rjacobi/euler_solver.hpp"
#include "rjacobi/gaussian_paths.hpp"

namespace rjacobi {

void MLParams::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("MLParams." + field + " " + why);
  };
  if (!(C > 0.0)) fail("C", "must be positive");
  if (!(V2 != 0.0)) fail("V2", "must be nonzero");
  if (!(V4 != 0.0)) fail("V4", "must be nonzero");
  if (!(phi > 0.0)) fail("phi", "must be positive");
  if (!(sigma_star >= 0.0 && sigma_star < 1.0))
    fail("sigma_star", "must lie in [0, 1)");
  if (!(H > 0.0 && H < 1.0)) fail("H", "must lie in (0, 1)");
  if (!(beta > 1.0 - H && beta < 1.0))
    fail("beta", "must lie in (1 - H, 1)");
}

RateFunctions rate_functions(const MLParams& p, double v) {
  RateFunctions r;
  const double s = (v - p.V3) / p.V4;
  const double ch = std::cosh(0.5 * s);
  const double th = std::tanh(s);
  r.a = 0.5 * p.phi * ch * (1.0 + th);
  r.b = 0.5 * p.phi * ch * (1.0 - th);
  r.m_inf = 0.5 * (1.0 + std::tanh((v - p.V1) / p.V2));
  r.h_gate = r.a / (r.a + r.b);
  return r;
}

EffectiveParams effective_jacobi_params(const MLParams& p, double v) {
  const RateFunctions r = rate_functions(p, v);
  EffectiveParams e;
  e.theta = r.a + r.b;
  e.mu = r.a / e.theta;
  if (!(e.mu > 0.0 && e.mu < 1.0)) {
    throw std::runtime_error(
        "effective_jacobi_params: gate rates saturated at v = " +
        std::to_string(v) + " (voltage far outside the physical range)");
  }
  e.gamma =
      p.sigma_star * std::pow(2.0 * r.a * r.b / (e.theta * e.theta), p.beta);
  // Same expression shape the path solver uses for its noise factor, so a
  // frozen-voltage simulation and a direct solve agree bit for bit.
  e.c_diff = e.gamma * std::pow(e.theta, p.beta);
  return e;
}

ModelParams effective_model_params(const MLParams& p, double v) {
  const EffectiveParams e = effective_jacobi_params(p, v);
  ModelParams m;
  m.theta = e.theta;
  m.mu = e.mu;
  m.gamma = e.gamma;
  m.beta = p.beta;
  m.alpha = 0.5 * ((1.0 - p.beta) + p.H);
  m.validate();
  return m;
}

NeuronTrajectory simulate_ml(const MLParams& p, double T, std::size_t n,
                             double x0, double v0, std::uint64_t seed,
                             double root_tol) {
  p.validate();
  if (!(T > 0.0)) throw std::invalid_argument("simulate_ml: T must be positive");
  if (n < 2) throw std::invalid_argument("simulate_ml: n must be at least 2");
  if (!(x0 > 0.0 && x0 < 1.0))
    throw std::invalid_argument("simulate_ml: x0 must lie in (0,1)");
  if (!(v0 >= -70.0 && v0 <= 30.0))
    throw std::invalid_argument("simulate_ml: v0 must lie in [-70, 30]");

  const double h = T / static_cast<double>(n);
  const TransformTable table(p.beta);

  // One driver for the whole trajectory; the deterministic limit skips the
  // sampling but runs the identical stepping code with zero increments.
  GaussianPath w;
  if (p.sigma_star > 0.0) w = sample_fbm(T, n, p.H, seed);

  NeuronTrajectory out;
  out.times.resize(n + 1);
  out.V.resize(n + 1);
  out.X.resize(n + 1);
  out.times[0] = 0.0;
  out.V[0] = v0;
  out.X[0] = x0;

  double y = table.F(x0);
  double x_prev = x0;
  for (std::size_t k = 0; k < n; ++k) {
    const double vk = out.V[k];
    const EffectiveParams e = effective_jacobi_params(p, vk);
    const double dw =
        p.sigma_star > 0.0 ? w.values[k + 1] - w.values[k] : 0.0;
    const double A = y + e.c_diff * dw;
    detail::StepResult st;
    try {
      st = detail::step_root(A, h, e.theta, e.mu, table, root_tol, x_prev);
    } catch (const std::runtime_error& err) {
      throw std::runtime_error("simulate_ml: gate step " + std::to_string(k) +
                               ": " + err.what());
    }
    y = st.y;
    x_prev = st.x;
    out.X[k + 1] = st.x;

    const RateFunctions r = rate_functions(p, vk);
    const double i_ion = p.g_Ca * r.m_inf * (vk - p.V_Ca) +
                         p.g_K * st.x * (vk - p.V_K) +
                         p.g_L * (vk - p.V_L);
    out.V[k + 1] = vk + h * (p.I - i_ion) / p.C;
    out.times[k + 1] = static_cast<double>(k + 1) * h;
  }
  return out;
}

}  // namespace rjacobi
