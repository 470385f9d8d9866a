#pragma once

#include <cstddef>
#include <vector>

namespace rjacobi {

// Nodes and weights of a Gaussian quadrature rule.
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

// Gauss-Jacobi rule: integrates f(x)*(1-x)^a*(1+x)^b exactly over [-1,1] for
// polynomial f up to degree 2n-1. Requires a,b > -1. Computed by Golub-Welsch
// (symmetric tridiagonal eigenproblem), so nodes come out sorted ascending.
QuadRule gauss_jacobi(int n, double a, double b);

// Gauss-Laguerre rule: integrates f(x)*exp(-x) over [0,inf).
QuadRule gauss_laguerre(int n);

}  // namespace rjacobi
