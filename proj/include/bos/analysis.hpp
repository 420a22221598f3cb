#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bos/eigensolver.hpp"
#include "bos/types.hpp"

namespace bos {

// Empirical constants of the weighted decay bound ||v||_{inf,c} <= b |lambda|^m,
// c = 1 + 1/eps, fitted as an envelope over a set of eigenpairs.
struct DecayBound {
  double c = 0.0;
  double b_fit = 0.0;
  double m_fit = 0.0;
  std::vector<double> weighted_norms;  // per input pair
  bool degenerate_spread = false;  // |lambda| range under one decade; m_fit
                                   // is not safe to extrapolate
};

struct CrossRow {
  double lambda_matrix = 0.0;
  std::optional<double> lambda_shooting;
  std::optional<double> lambda_sl;
  std::optional<double> connection_b;  // |b| of the u = a u1 + b u2 fit
  std::optional<double> decay_slope;
  double max_discrepancy = 0.0;
};

struct CrossReport {
  double epsilon = 0.0;
  std::vector<CrossRow> rows;  // sorted by lambda_matrix
  std::vector<double> unmatched_shooting;
  std::vector<double> unmatched_sl;
};

// sup_n |v_n| n^c, indices 1-based.
double weighted_sup_norm(const std::vector<cplx>& v, double c);

// Least-squares slope of log|v_n| against log n over 1-based indices
// [lo, hi], skipping entries below the underflow floor. Returns nullopt when
// fewer than 5 usable points remain.
std::optional<double> decay_slope(const std::vector<cplx>& v, std::size_t lo,
                                  std::size_t hi);

// Envelope fit of the decay bound over stable eigenpairs: the slope comes
// from an ordinary regression of log-norm against log|lambda|, the intercept
// is then raised so every point lies on or below b |lambda|^m.
DecayBound davies_fit(const std::vector<EigenPair>& pairs, double epsilon);

struct Ell1Tail {
  double sum = 0.0;
  double tail_estimate = 0.0;
  bool summable = true;  // false when the fitted decay is too slow for l^1
};

// Partial sum of |v_n| plus an integral-comparison bound on the truncated
// tail from the fitted power law.
Ell1Tail ell1_tail(const std::vector<cplx>& v);

// Nearest-neighbour match of the three eigenvalue routes (relative tolerance
// 1e-4); unmatched entries are reported separately, never dropped.
CrossReport build_cross_report(double epsilon, const std::vector<EigenPair>& matrix_eigs,
                               const std::vector<double>& shooting_roots,
                               const std::vector<double>& sl_lambdas,
                               const std::vector<double>& connection_abs_b);

}  // namespace bos
