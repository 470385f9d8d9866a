#include "rjacobi/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rjacobi {

namespace {

// Recurrence coefficients of the monic Jacobi polynomials for the weight
// (1-x)^a (1+x)^b: x*p_k = p_{k+1} + alpha_k p_k + beta_k p_{k-1}.
// The k=0 diagonal and the k=1 off-diagonal use the cancelled forms so the
// 0/0 cases a+b = 0 and a+b = -1 (e.g. Chebyshev a=b=-1/2) stay finite.
void jacobi_recurrence(int n, double a, double b, std::vector<double>& diag,
                       std::vector<double>& offdiag) {
  diag.resize(n);
  offdiag.assign(n > 0 ? n - 1 : 0, 0.0);
  for (int k = 0; k < n; ++k) {
    if (k == 0) {
      diag[k] = (b - a) / (a + b + 2.0);
    } else {
      double s = 2.0 * k + a + b;
      diag[k] = (b * b - a * a) / (s * (s + 2.0));
    }
  }
  for (int k = 1; k < n; ++k) {
    double bk2;
    if (k == 1) {
      double s = a + b;
      bk2 = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + s) * (2.0 + s) * (3.0 + s));
    } else {
      double s = 2.0 * k + a + b;
      bk2 = 4.0 * k * (k + a) * (k + b) * (k + a + b) /
            (s * s * (s + 1.0) * (s - 1.0));
    }
    offdiag[k - 1] = std::sqrt(bk2);
  }
}

// Golub-Welsch: nodes are the eigenvalues of the symmetric tridiagonal
// recurrence matrix; weight_i = mu0 * (first eigenvector component)^2.
QuadRule golub_welsch(const std::vector<double>& diag,
                      const std::vector<double>& offdiag, double mu0) {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) J(i, i) = diag[i];
  for (int i = 0; i + 1 < n; ++i) {
    J(i, i + 1) = offdiag[i];
    J(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("golub_welsch: eigensolver failed");
  }
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace

QuadRule gauss_jacobi(int n, double a, double b) {
  if (n < 1) {
    throw std::invalid_argument("gauss_jacobi: n must be >= 1, got " +
                                std::to_string(n));
  }
  if (!(a > -1.0) || !(b > -1.0)) {
    throw std::invalid_argument(
        "gauss_jacobi: exponents must exceed -1, got a=" + std::to_string(a) +
        ", b=" + std::to_string(b));
  }
  std::vector<double> diag, offdiag;
  jacobi_recurrence(n, a, b, diag, offdiag);
  // mu0 = int_{-1}^{1} (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1).
  double mu0 = std::exp2(a + b + 1.0) *
               std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                        std::lgamma(a + b + 2.0));
  return golub_welsch(diag, offdiag, mu0);
}

QuadRule gauss_laguerre(int n) {
  if (n < 1) {
    throw std::invalid_argument("gauss_laguerre: n must be >= 1, got " +
                                std::to_string(n));
  }
  std::vector<double> diag(n), offdiag(n > 0 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) diag[k] = 2.0 * k + 1.0;
  for (int k = 1; k < n; ++k) offdiag[k - 1] = static_cast<double>(k);
  return golub_welsch(diag, offdiag, 1.0);
}

}  // namespace rjacobi
