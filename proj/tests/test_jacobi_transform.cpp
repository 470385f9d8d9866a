#include "rjacobi/jacobi_transform.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

using rjacobi::ModelParams;
using rjacobi::TransformTable;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<double> log_dense_grid(std::size_t n) {
  // Points crowding both endpoints of (0,1), plus a uniform fill.
  std::vector<double> xs;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(i + 1) / static_cast<double>(n + 1);
    xs.push_back(0.5 * std::pow(1e-12, 1.0 - u));        // left cluster
    xs.push_back(1.0 - 0.5 * std::pow(1e-12, 1.0 - u));  // right cluster
    xs.push_back(u);                                     // uniform fill
  }
  return xs;
}
}  // namespace

TEST_CASE("square-root exponent has the arcsine closed form") {
  const TransformTable table(0.5);
  CHECK(table.F1() == doctest::Approx(kPi).epsilon(1e-13));
  for (double x : {1e-10, 1e-4, 0.03, 0.25, 0.5, 0.77, 0.9999, 1.0 - 1e-10}) {
    const double expect = kPi / 2.0 + std::asin(2.0 * x - 1.0);
    CHECK(table.F(x) == doctest::Approx(expect).epsilon(1e-12));
    // Inverse closed form: x = (1 - cos y)/2.
    const double y = expect;
    CHECK(table.F_inv(y) == doctest::Approx((1.0 - std::cos(y)) / 2.0)
                                .epsilon(1e-10));
  }
}

TEST_CASE("transform matches an adaptive-integration oracle across exponents") {
  for (double beta : {0.55, 0.6, 0.75, 0.9}) {
    const TransformTable table(beta);
    for (double x : {1e-6, 0.01, 0.2, 0.5, 0.66, 0.95, 0.9999}) {
      const double expect = oracle::lamperti(x, beta);
      CHECK(table.F(x) == doctest::Approx(expect).epsilon(1e-11));
    }
    // Full-range value against the Beta function.
    CHECK(table.F1() ==
          doctest::Approx(oracle::beta_fn(1.0 - beta, 1.0 - beta))
              .epsilon(1e-12));
  }
}

TEST_CASE("frozen spot value of the transform") {
  // Independently computed with the substitution-based oracle and pinned;
  // guards against silent quadrature regressions.
  CHECK(rjacobi::eval_F(0.3, 0.75) ==
        doctest::Approx(3.117710135549393).epsilon(1e-12));
}

TEST_CASE("symmetry of the transform about one half") {
  for (double beta : {0.5, 0.7}) {
    const TransformTable table(beta);
    for (double x : {0.001, 0.1, 0.33, 0.49}) {
      CHECK(table.F(x) + table.F(1.0 - x) ==
            doctest::Approx(table.F1()).epsilon(1e-12));
    }
  }
}

TEST_CASE("two-parameter transform: limits, scaling, and the flat case") {
  const double beta = 0.6;
  // u = 0 closed form y^{1-beta}/(1-beta).
  CHECK(rjacobi::eval_F2(0.0, 2.5, beta) ==
        doctest::Approx(std::pow(2.5, 0.4) / 0.4).epsilon(1e-13));
  // u = 1 reduces to the one-parameter transform.
  CHECK(rjacobi::eval_F2(1.0, 0.3, beta) ==
        doctest::Approx(rjacobi::eval_F(0.3, beta)).epsilon(1e-13));
  // Scaling identity F(u,y) = u^{-(1-beta)} F(1, u*y).
  for (double u : {0.1, 0.25, 0.8}) {
    for (double y : {0.5, 1.0, 1.0 / u}) {
      const double lhs = rjacobi::eval_F2(u, y, beta);
      const double rhs =
          std::pow(u, -(1.0 - beta)) * rjacobi::eval_F(u * y, beta);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
  // Boundary u*y = 1 evaluates to the scaled full-range value.
  CHECK(rjacobi::eval_F2(0.25, 4.0, 0.5) ==
        doctest::Approx(2.0 * kPi).epsilon(1e-12));
  CHECK_THROWS_AS(rjacobi::eval_F2(0.5, 2.5, beta), std::domain_error);
  CHECK_THROWS_AS(rjacobi::eval_F2(-0.1, 0.5, beta), std::domain_error);
  CHECK_THROWS_AS(rjacobi::eval_F2(0.5, -0.5, beta), std::domain_error);
}

namespace {

// True when the inverse met its tolerance, or no adjacent double does
// better (the preimage sits where one ulp of x moves F beyond tol, so the
// returned value is the best the format can express).
bool inverse_is_best_possible(const TransformTable& table, double z,
                              double x) {
  const double err = std::abs(table.F(x) - z);
  if (err <= 1e-12) return true;
  const double x_dn = std::nextafter(x, 0.0);
  const double x_up = std::nextafter(x, 1.0);
  return std::abs(table.F(x_dn) - z) >= err &&
         std::abs(table.F(x_up) - z) >= err;
}

}  // namespace

TEST_CASE("inverse is exact at the endpoints and accurate inside") {
  for (double beta : {0.5, 0.65, 0.85}) {
    const TransformTable table(beta);
    CHECK(table.F_inv(0.0) == 0.0);
    CHECK(table.F_inv(table.F1()) == 1.0);
    const std::size_t m = 400;
    for (std::size_t i = 1; i < m; ++i) {
      const double z = table.F1() * static_cast<double>(i) / m;
      const double x = table.F_inv(z);
      CHECK(x > 0.0);
      CHECK(x <= 1.0);
      CHECK(inverse_is_best_possible(table, z, x));
    }
    // Deep into both tails.
    for (double z : {table.F1() * 1e-9, table.F1() * (1.0 - 1e-9)}) {
      CHECK(inverse_is_best_possible(table, z, table.F_inv(z)));
    }
    CHECK_THROWS_AS(table.F_inv(-1e-9), std::domain_error);
    CHECK_THROWS_AS(table.F_inv(table.F1() * (1.0 + 1e-9)), std::domain_error);
  }
}

TEST_CASE("inverse round-trips the log-dense sweep") {
  const TransformTable table(0.7);
  for (double x : log_dense_grid(40)) {
    const double z = table.F(x);
    const double back = table.F_inv(z);
    // Near the endpoints F' blows up, so compare through F, not in x.
    CHECK(std::abs(table.F(back) - z) <= 1e-12);
  }
}

TEST_CASE("table grids are strictly increasing") {
  const TransformTable table(0.6);
  const auto& xs = table.xs();
  const auto& Fs = table.Fs();
  REQUIRE(xs.size() == Fs.size());
  CHECK(xs.size() >= 4096);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    CHECK(xs[i] > xs[i - 1]);
    CHECK(Fs[i] > Fs[i - 1]);
  }
}

TEST_CASE("drift in the original coordinates") {
  ModelParams p;
  p.theta = 2.0;
  p.mu = 0.3;
  p.beta = 0.6;
  CHECK(rjacobi::eval_G(0.3, p) == doctest::Approx(0.0));
  CHECK(rjacobi::eval_G(0.1, p) > 0.0);
  CHECK(rjacobi::eval_G(0.9, p) < 0.0);
  const double x = 0.2;
  const double expect = 2.0 * (0.3 - x) * std::pow(x * (1.0 - x), -0.6);
  CHECK(rjacobi::eval_G(x, p) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("transformed drift matches the arcsine closed form") {
  ModelParams p;
  p.theta = 1.3;
  p.mu = 0.4;
  p.beta = 0.5;
  const TransformTable table(0.5);
  for (double y : {0.3, 1.0, kPi / 2.0, 2.5}) {
    const double expect =
        p.theta * (2.0 * p.mu - 1.0 + std::cos(y)) / std::sin(y);
    CHECK(rjacobi::eval_GoFinv(y, p, table) ==
          doctest::Approx(expect).epsilon(1e-10));
    // The generic composition route must agree too, up to the inverse
    // tolerance amplified by the local drift slope r = G'/F'.
    const double x = table.F_inv(y);
    const double allow =
        1e-10 + 4e-12 * std::abs(rjacobi::drift_ratio(x, p));
    CHECK(std::abs(rjacobi::eval_G(x, p) - expect) <= allow);
  }
}

TEST_CASE("transformed drift is strictly decreasing with the stated limits") {
  ModelParams p;
  p.theta = 1.0;
  p.mu = 0.6;
  p.beta = 0.7;
  const TransformTable table(0.7);
  double prev = rjacobi::eval_GoFinv(table.F1() * 1e-4, p, table);
  CHECK(prev > 0.0);  // blows up to +inf near 0
  for (int i = 1; i <= 50; ++i) {
    const double z = table.F1() * (1e-4 + (1.0 - 2e-4) * i / 50.0);
    const double cur = rjacobi::eval_GoFinv(z, p, table);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(prev < 0.0);  // down to -inf near F1
}

TEST_CASE("drift ratio equals the derivative of the transformed drift") {
  ModelParams p;
  p.theta = 0.8;
  p.mu = 0.35;
  p.beta = 0.62;
  const TransformTable table(0.62);
  for (double x : {0.1, 0.35, 0.5, 0.8}) {
    const double z = table.F(x);
    const double eps = 1e-6;
    const double fd = (rjacobi::eval_GoFinv(z + eps, p, table) -
                       rjacobi::eval_GoFinv(z - eps, p, table)) /
                      (2.0 * eps);
    CHECK(rjacobi::drift_ratio(x, p) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("contraction constant: symmetric closed case and a brute-force scan") {
  ModelParams p;  // beta = mu = 1/2, theta = 1
  CHECK(rjacobi::contraction_constant(p) == doctest::Approx(1.0).epsilon(1e-9));
  p.theta = 2.5;
  CHECK(rjacobi::contraction_constant(p) == doctest::Approx(2.5).epsilon(1e-9));

  p.theta = 1.2;
  p.mu = 0.3;
  p.beta = 0.6;
  const double l = rjacobi::contraction_constant(p);
  double brute = 1e300;
  const std::size_t m = 200000;
  for (std::size_t i = 1; i < m; ++i) {
    const double x = static_cast<double>(i) / m;
    brute = std::min(brute, -rjacobi::drift_ratio(x, p));
  }
  CHECK(l == doctest::Approx(brute).epsilon(1e-6));
  CHECK(l > 0.0);
  // The ratio never beats the infimum.
  for (double x : log_dense_grid(25)) {
    CHECK(rjacobi::drift_ratio(x, p) <= -l * (1.0 - 1e-9));
  }
}

TEST_CASE("parameter validation names the offending field") {
  ModelParams p;
  p.theta = -1.0;
  CHECK_THROWS_WITH_AS(p.validate(),
                       doctest::Contains("theta"), std::invalid_argument);
  p = ModelParams{};
  p.mu = 1.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("mu"),
                       std::invalid_argument);
  p = ModelParams{};
  p.beta = 0.3;  // violates beta > 1 - alpha for alpha = 0.55
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("beta"),
                       std::invalid_argument);
  p = ModelParams{};
  p.alpha = 1.5;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("alpha"),
                       std::invalid_argument);
}
