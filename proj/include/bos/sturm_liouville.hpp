#pragma once

#include <cstddef>
#include <vector>

#include "bos/types.hpp"

namespace bos {

// Gauss-Jacobi rule for integrals of the form
//   int_0^1 (1-z)^alpha g(z) dz ~= sum_i weights[i] g(nodes[i]).
struct QuadratureRule {
  std::vector<double> nodes;    // in (0,1)
  std::vector<double> weights;  // positive
};

QuadratureRule gauss_jacobi_01(std::size_t n, double alpha);

// Galerkin matrices of -(p u')' = mu w u over the trial space
// phi_j(z) = z P_j(2z-1), j = 0..K-1, with Legendre P_j. The basis vanishes
// at z=0, cancelling the order-1 pole of w analytically; the endpoint factor
// (1-z)^(1/eps) is absorbed into the quadrature weight so the remaining
// integrands are smooth.
struct SturmLiouvilleSystem {
  double epsilon = 0.0;
  std::size_t dim = 0;               // K
  std::vector<double> stiffness;     // K x K row-major, symmetric
  std::vector<double> mass;          // K x K row-major, symmetric positive definite
  std::size_t quad_points = 0;
  double quad_refinement_error = 0.0;  // entrywise drift when doubling the rule

  double stiff(std::size_t i, std::size_t j) const { return stiffness[i * dim + j]; }
  double mass_at(std::size_t i, std::size_t j) const { return mass[i * dim + j]; }
};

// Assembles both matrices; the rule size is verified by refinement doubling,
// and non-convergence is reported with the worst entry index.
SturmLiouvilleSystem assemble(double epsilon, std::size_t k);

struct SLMode {
  double mu;
  std::vector<double> coeffs;  // basis coefficients, mass-normalized
};

// Smallest `count` eigenvalues of stiffness c = mu mass c, ascending. Real by
// construction: the pencil is reduced by the mass Cholesky factor to a
// standard symmetric problem.
std::vector<double> sl_spectrum(const SturmLiouvilleSystem& sys, std::size_t count);

std::vector<SLMode> sl_eigenpairs(const SturmLiouvilleSystem& sys, std::size_t count);

// lambda = eps * mu / 2.
double lambda_from_mu(double epsilon, double mu);

// c^T mass c.
double weighted_norm_sq(const std::vector<double>& coeffs,
                        const SturmLiouvilleSystem& sys);

// Trial basis and its derivative, for evaluating discrete eigenfunctions.
double sl_basis_value(std::size_t j, double z);
double sl_basis_derivative(std::size_t j, double z);

}  // namespace bos
