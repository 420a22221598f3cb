#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bos/operator_core.hpp"
#include "bos/types.hpp"

namespace bos {

// One computed eigenpair of a truncated operator.
struct EigenPair {
  cplx lambda;
  std::vector<cplx> vector;  // unit 2-norm when computed; empty otherwise
  double residual = 0.0;     // ||T v - lambda v||_2 (0 when no vector)
  bool stable = false;
  std::optional<double> decay_slope;
};

struct SpectrumResult {
  double epsilon = 0.0;
  std::size_t n = 0;
  std::vector<EigenPair> pairs;  // sorted by (Re, Im) ascending
};

// Diagonally balanced form of a tridiagonal operator: the off-diagonal pair
// straddling position k is mapped to (+g_k, -g_k) with g_k = sqrt(-sub*sup)
// whenever sub*sup < 0, leaving the spectrum unchanged. The exactly built
// section of A+ is already of this form. `scale` records the similarity
// D^-1 T D so that eigenvectors can be mapped back.
struct BalancedOperator {
  TridiagonalOperator original;
  TridiagonalOperator balanced;
  std::vector<double> scale;  // diagonal of D, length N
};

BalancedOperator balance(const TridiagonalOperator& t);

// All N eigenvalues of the truncated operator, via implicit-shift QL on the
// similar complex symmetric tridiagonal form, each polished by Newton steps
// on the characteristic determinant. Eigenvectors (when requested) come from
// shifted inverse iteration on the original matrix, with reorthogonalization
// against previously converged vectors of nearby eigenvalues.
//
// Throws numerical_error with the offending index if the QL iteration fails
// to converge within its budget.
SpectrumResult eigen_all(const BalancedOperator& b, bool want_vectors);

// Convenience: balance + eigen_all.
SpectrumResult compute_spectrum(const TridiagonalOperator& t, bool want_vectors);

// Retains the pairs of `small` whose eigenvalue matches one of `large`
// within tol*(1+|lambda|); retained pairs are marked stable.
// Requires large.n >= 2*small.n and equal epsilon.
std::vector<EigenPair> filter_stable(const SpectrumResult& small,
                                     const SpectrumResult& large,
                                     double tol = 1e-8);

// Same matching rule, but sets the stable flags of `small` in place.
void mark_stable(SpectrumResult& small, const SpectrumResult& large,
                 double tol = 1e-8);

// Unit-norm eigenvector of T for a given (approximate) eigenvalue, by two
// rounds of shifted inverse iteration; returns the vector and its residual.
std::pair<std::vector<cplx>, double> eigenvector_for(const TridiagonalOperator& t,
                                                     cplx lambda);

}  // namespace bos
