#pragma once

#include <cstddef>
#include <vector>

#include "bos/types.hpp"

namespace bos {

// Model parameter of the Benilov--O'Brien--Sazonov operator, 0 < epsilon < 2.
struct EpsilonParam {
  double value;

  explicit EpsilonParam(double eps);

  // Rejects values of epsilon for which 1/epsilon is within `tol` of an
  // integer; such values break the theorem hypotheses and make the Frobenius
  // exponents at z=1 resonant. The diagnostic names the offending integer.
  void require_nonresonant(double tol = 1e-9) const;
};

void validate_epsilon(double eps);
bool is_resonant(double eps, double tol = 1e-9);

// N x N leading principal section of the Fourier-side operator A+.
// Row n (1-based, n = 1..N): sub-diagonal (eps/2) n(n-1), diagonal n,
// super-diagonal -(eps/2) n(n+1).
//
// Storage is 0-based: diag[i] is row n = i+1; sub[i] is the entry in row
// n = i+2 coupling to column n-1; sup[i] is the entry in row n = i+1
// coupling to column n+1.
struct TridiagonalOperator {
  std::size_t size = 0;      // N
  std::vector<double> sub;   // length N-1
  std::vector<double> diag;  // length N
  std::vector<double> sup;   // length N-1
  double epsilon = 0.0;

  // Max row sum norm.
  double row_norm() const;
};

// The seven Heun constants for the generating-function ODE.
// alpha=1, beta=0, gamma=0, a=-1 always; delta = 1 + 1/eps,
// eps_h = 1 - 1/eps, mu = 2 lambda / eps.
struct HeunParams {
  double alpha;
  double beta;
  double gamma;
  double delta;
  double eps_h;
  double a;
  cplx mu;
  double epsilon;  // the model parameter the constants were derived from

  // gamma + delta + eps_h - (alpha + beta + 1); zero for any Fuchsian set.
  double fuchsian_defect() const;
};

// Coefficients of the self-adjoint form -(p u')' + q u = mu w u on (0,1):
//   p(z) = (1-z)^(1+1/eps) (1+z)^(1-1/eps)
//   q(z) = 0
//   w(z) = z^-1 (1-z)^(1/eps) (1+z)^(-1/eps)
// Powers with non-integer exponents use the real branch on (0,1).
struct SLCoefficients {
  double epsilon;

  double p(double z) const;
  double q(double z) const;
  // Throws std::domain_error at z=0 (w has a pole of order 1 there).
  double w(double z) const;
  // z*w(z), which extends continuously to z=0 with value 1.
  double zw(double z) const;
};

// Matrix entry in row n coupling to column n-1: (eps/2) n (n-1). Requires n >= 1.
double entry_sub(double epsilon, long n);

// Matrix entry in row n coupling to column n+1: -(eps/2) n (n+1). Requires n >= 1.
double entry_sup(double epsilon, long n);

// Builds the truncated section of A+. Throws std::invalid_argument for
// N = 0 or epsilon outside (0,2).
TridiagonalOperator build_truncated(double epsilon, std::size_t n);

HeunParams heun_parameters(double epsilon, cplx lambda);

SLCoefficients sl_coefficients(double epsilon);

// Truncation of A- (rows -1..-N from the same entry formula evaluated at
// negative indices), re-indexed to 1..N by the order-reversing map -n -> n.
TridiagonalOperator reflect_minus(const TridiagonalOperator& t);

}  // namespace bos
