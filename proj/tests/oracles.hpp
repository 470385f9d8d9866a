// Independent numerical oracles for the test suite. Everything here is
// deliberately built from different primitives than the library under test:
// adaptive Simpson instead of Gauss rules, substitution instead of weighted
// quadrature, classic RK4 for ODE references.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

// Adaptive Simpson with absolute tolerance; f must be finite on [a,b].
inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60);
}

// int_0^x [v(1-v)]^{-beta} dv for x in [0, 1/2]: the substitution
// v = u^{1/(1-beta)} removes the left-endpoint singularity exactly,
//   integral = 1/(1-beta) * int_0^{x^{1-beta}} (1 - u^{1/(1-beta)})^{-beta} du,
// leaving a smooth integrand for x <= 1/2.
inline double lamperti_half(double x, double beta, double tol = 1e-13) {
  if (x < 0.0 || x > 0.5 + 1e-15)
    throw std::invalid_argument("lamperti_half: x outside [0, 1/2]");
  if (x == 0.0) return 0.0;
  const double e = 1.0 - beta;
  const double top = std::pow(x, e);
  auto f = [&](double u) { return std::pow(1.0 - std::pow(u, 1.0 / e), -beta); };
  return integrate(f, 0.0, top, tol) / e;
}

// Full transform on [0,1] via the x <-> 1-x reflection.
inline double lamperti(double x, double beta, double tol = 1e-13) {
  if (x < 0.0 || x > 1.0)
    throw std::invalid_argument("lamperti: x outside [0,1]");
  const double F_half_one = lamperti_half(0.5, beta, tol);
  if (x <= 0.5) return lamperti_half(x, beta, tol);
  return 2.0 * F_half_one - lamperti_half(1.0 - x, beta, tol);
}

// Euler Beta function via lgamma.
inline double beta_fn(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

// Classic fixed-step RK4 for an autonomous system y' = f(y).
inline std::vector<std::vector<double>> rk4(
    const std::function<std::vector<double>(const std::vector<double>&)>& f,
    std::vector<double> y0, double T, std::size_t n) {
  std::vector<std::vector<double>> out;
  out.reserve(n + 1);
  out.push_back(y0);
  const double h = T / static_cast<double>(n);
  const std::size_t dim = y0.size();
  std::vector<double> y = y0, tmp(dim);
  for (std::size_t k = 0; k < n; ++k) {
    const std::vector<double> k1 = f(y);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    const std::vector<double> k2 = f(tmp);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    const std::vector<double> k3 = f(tmp);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * k3[i];
    const std::vector<double> k4 = f(tmp);
    for (std::size_t i = 0; i < dim; ++i) {
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out.push_back(y);
  }
  return out;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace oracle
