#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "bos/eigensolver.hpp"
#include "bos/operator_core.hpp"
#include "bos/recurrence.hpp"
#include "bos/sturm_liouville.hpp"

namespace {

double beta_integral(double a, double b) {  // int_0^1 x^(a-1) (1-x)^(b-1) dx
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

}  // namespace

TEST_CASE("gauss_jacobi_01 integrates monomials against the Beta oracle") {
  for (double alpha : {0.0, 0.5, 2.0, 1.0 / 0.7}) {
    const bos::QuadratureRule rule = bos::gauss_jacobi_01(24, alpha);
    for (int k = 0; k <= 12; ++k) {
      double q = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        q += rule.weights[i] * std::pow(rule.nodes[i], k);
      }
      // int_0^1 (1-z)^alpha z^k dz = B(k+1, alpha+1)
      const double exact = beta_integral(k + 1.0, alpha + 1.0);
      CHECK(q == doctest::Approx(exact).epsilon(1e-13));
    }
    for (double w : rule.weights) CHECK(w > 0.0);
    for (double z : rule.nodes) {
      CHECK(z > 0.0);
      CHECK(z < 1.0);
    }
  }
}

TEST_CASE("K=1 closed forms at eps=1") {
  const bos::SturmLiouvilleSystem sys = bos::assemble(1.0, 1);
  CHECK(sys.stiff(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  const double mass_exact = 1.5 - 2.0 * std::log(2.0);
  CHECK(sys.mass_at(0, 0) == doctest::Approx(mass_exact).epsilon(1e-13));

  const std::vector<double> mu = bos::sl_spectrum(sys, 1);
  CHECK(mu[0] == doctest::Approx((1.0 / 3.0) / mass_exact).epsilon(1e-12));

  CHECK(bos::weighted_norm_sq({1.0}, sys) ==
        doctest::Approx(mass_exact).epsilon(1e-13));
  CHECK(bos::weighted_norm_sq({0.0}, sys) == 0.0);
}

TEST_CASE("assembled matrices are symmetric and positive where required") {
  const bos::SturmLiouvilleSystem sys = bos::assemble(0.7, 30);
  for (std::size_t i = 0; i < sys.dim; ++i) {
    for (std::size_t j = 0; j < sys.dim; ++j) {
      CHECK(sys.stiff(i, j) == sys.stiff(j, i));  // exact by construction
      CHECK(sys.mass_at(i, j) == sys.mass_at(j, i));
    }
  }
  // positivity of the mass form on random vectors
  std::mt19937 rng(5);
  std::normal_distribution<double> dn;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> c(sys.dim);
    for (double& x : c) x = dn(rng);
    CHECK(bos::weighted_norm_sq(c, sys) > 0.0);
  }
  // discrete self-adjointness of the stiffness form
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(sys.dim), y(sys.dim);
    for (double& v : x) v = dn(rng);
    for (double& v : y) v = dn(rng);
    double xay = 0.0, yax = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < sys.dim; ++i) {
      for (std::size_t j = 0; j < sys.dim; ++j) {
        xay += x[i] * sys.stiff(i, j) * y[j];
        yax += y[i] * sys.stiff(i, j) * x[j];
        scale += std::abs(x[i] * sys.stiff(i, j) * y[j]);
      }
    }
    CHECK(std::abs(xay - yax) <= 1e-13 * (scale + 1.0));
  }
}

TEST_CASE("mass Cholesky succeeds across epsilon at K=200") {
  for (double eps : {0.3, 0.7, 1.3}) {
    const bos::SturmLiouvilleSystem sys = bos::assemble(eps, 200);
    CHECK_NOTHROW(bos::sl_spectrum(sys, 1));
  }
}

TEST_CASE("sl_spectrum agrees with the Eigen generalized solver") {
  const bos::SturmLiouvilleSystem sys = bos::assemble(0.7, 40);
  const long n = static_cast<long>(sys.dim);
  Eigen::MatrixXd s(n, n), m(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      s(i, j) = sys.stiff(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      m(i, j) = sys.mass_at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(s, m);
  const std::vector<double> mu = bos::sl_spectrum(sys, 10);
  for (std::size_t k = 0; k < mu.size(); ++k) {
    CHECK(mu[k] == doctest::Approx(ges.eigenvalues()(static_cast<long>(k)))
                       .epsilon(1e-10));
    if (k > 0) CHECK(mu[k] >= mu[k - 1]);
  }
}

TEST_CASE("lambda_from_mu inverts mu = 2 lambda / eps") {
  CHECK(bos::lambda_from_mu(0.5, 4.0) == doctest::Approx(1.0));
  CHECK(bos::lambda_from_mu(1.3, 0.0) == 0.0);
  CHECK(bos::lambda_from_mu(2.0, 3.0) == doctest::Approx(3.0));
}

TEST_CASE("Rayleigh quotient is non-increasing in K") {
  double prev = 1e300;
  for (std::size_t k : {10u, 20u, 40u, 80u}) {
    const double mu1 = bos::sl_spectrum(bos::assemble(0.7, k), 1)[0];
    CHECK(mu1 <= prev + 1e-12);
    prev = mu1;
  }
}

TEST_CASE("grid convergence and three-way agreement with shooting") {
  // |mu_k(K) - mu_k(2K)| shrinks geometrically
  const std::vector<double> muA = bos::sl_spectrum(bos::assemble(0.7, 40), 6);
  const std::vector<double> muB = bos::sl_spectrum(bos::assemble(0.7, 80), 6);
  const std::vector<double> muC = bos::sl_spectrum(bos::assemble(0.7, 160), 6);
  for (std::size_t k = 0; k < 6; ++k) {
    const double d1 = std::abs(muA[k] - muB[k]);
    const double d2 = std::abs(muB[k] - muC[k]);
    CHECK(d2 <= 0.5 * d1 + 1e-12);
  }
  // converged lambdas reproduce the shooting roots
  const std::vector<double> roots = bos::find_real_roots(0.7, 0.2, 9.0, 300);
  REQUIRE(roots.size() >= 3);
  for (std::size_t k = 0; k < 3; ++k) {
    const double lam = bos::lambda_from_mu(0.7, muC[k]);
    CHECK(lam == doctest::Approx(roots[k]).epsilon(1e-8));
  }
}

TEST_CASE("matrix route lambdas appear in the SL route") {
  const bos::SpectrumResult s1 =
      bos::compute_spectrum(bos::build_truncated(0.5, 700), false);
  const bos::SpectrumResult s2 =
      bos::compute_spectrum(bos::build_truncated(0.5, 1400), false);
  const std::vector<bos::EigenPair> stable = bos::filter_stable(s1, s2, 1e-8);
  REQUIRE(!stable.empty());
  const std::vector<double> mu = bos::sl_spectrum(bos::assemble(0.5, 200), 12);
  for (const bos::EigenPair& p : stable) {
    double best = 1e300;
    for (double m : mu) {
      best = std::min(best, std::abs(bos::lambda_from_mu(0.5, m) - p.lambda.real()));
    }
    CHECK(best <= 1e-6 * (1.0 + std::abs(p.lambda)));
  }
}

TEST_CASE("discrete eigenfunctions satisfy the vanishing boundary flux") {
  const bos::SturmLiouvilleSystem sys = bos::assemble(0.7, 80);
  const std::vector<bos::SLMode> modes = bos::sl_eigenpairs(sys, 3);
  const bos::SLCoefficients coeff = bos::sl_coefficients(0.7);
  const double z = 1.0 - 1e-4;
  for (const bos::SLMode& mode : modes) {
    double u = 0.0, du = 0.0;
    for (std::size_t j = 0; j < mode.coeffs.size(); ++j) {
      u += mode.coeffs[j] * bos::sl_basis_value(j, z);
      du += mode.coeffs[j] * bos::sl_basis_derivative(j, z);
    }
    CHECK(std::abs(coeff.p(z) * du * u) <= 1e-6);
  }
}

TEST_CASE("assemble validates input") {
  CHECK_THROWS_AS(bos::assemble(2.3, 10), std::invalid_argument);
  CHECK_THROWS_AS(bos::assemble(0.5, 0), std::invalid_argument);
  CHECK_THROWS_AS(bos::sl_spectrum(bos::assemble(0.5, 5), 9), std::invalid_argument);
  CHECK_THROWS_AS(bos::weighted_norm_sq({1.0, 2.0}, bos::assemble(0.5, 5)),
                  std::invalid_argument);
}
