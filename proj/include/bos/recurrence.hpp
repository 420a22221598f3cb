#pragma once

#include <cstddef>
#include <vector>

#include "bos/types.hpp"

namespace bos {

// Solution values v_1..v_M of the three-term recurrence
//   (eps/2)(n+1)(n+2) v_{n+2} + (lambda-n-1) v_{n+1} - (eps/2) n(n+1) v_n = 0.
struct CoefficientSequence {
  double epsilon = 0.0;
  cplx lambda;
  std::vector<cplx> values;  // values[i] is v_{i+1}

  // forward_run: set when the iteration overflowed and stopped early.
  bool truncated = false;
  // backward_minimal: doubling the start index moved v_1..v_Nout by more
  // than the self-consistency target.
  bool accurate = true;
  // backward_minimal: |v_1| was negligible relative to the solution scale,
  // so the v_1 = 1 normalization was not applied.
  bool v1_negligible = false;

  cplx at(std::size_t n) const { return values.at(n - 1); }  // 1-based
  std::size_t length() const { return values.size(); }
};

struct GenEval {
  cplx value;
  double tail_bound = 0.0;
};

struct ScanResult {
  std::vector<cplx> roots;   // clustered, sorted by (Re, Im)
  std::size_t dropped = 0;   // seeds whose Newton iteration did not converge
};

// Controls the backward (Miller) recurrence start.
struct BackwardOptions {
  // Seed the run at the start index with the minimal solution's asymptotic
  // form instead of (0, 1). The plain seed converges only like (n/M)^(2/eps),
  // which is impractically slow for eps near 2; the asymptotic seed removes
  // that limitation. Root-finding paths enable this.
  bool asymptotic_seed = false;
  // Self-consistency target when doubling the start index.
  double self_consistency = 1e-10;
  // Cap on the automatically doubled start index.
  std::size_t max_start = 1u << 22;
};

// Forward iteration with v_1 = 1, v_2 = (1-lambda)/eps. Overflow truncates
// the run at the last finite index and sets `truncated`.
CoefficientSequence forward_run(double epsilon, cplx lambda, std::size_t m);

// Miller backward recurrence: seeds at index `start` (v_{start+1} = 0,
// v_start = 1, or the asymptotic seed), recurs down, normalizes to v_1 = 1,
// and returns v_1..v_nout. The run is repeated with a doubled start index
// until the result is self-consistent; failure to reach the target within
// `max_start` clears `accurate`. A numerically zero v_1 is reported via
// `v1_negligible` instead of dividing.
CoefficientSequence backward_minimal(double epsilon, cplx lambda, std::size_t start,
                                     std::size_t nout,
                                     const BackwardOptions& opt = {});

// Shooting residual F(lambda) = (eps v_2 - (1-lambda) v_1) / max(|v_1|,|v_2|)
// from the backward minimal solution. The numerator is analytic in lambda
// with zeros exactly at the eigenvalues of A+ (up to discretization), and
// the modulus scale keeps F pole-free and sign-stable on the real line,
// which the bracketing root finder relies on.
// `start` fixes the backward start index; 0 selects the default.
cplx shooting_residual(double epsilon, cplx lambda, std::size_t start = 0);

// Same zeros, different scale: (eps v_2 - (1-lambda) v_1) / v_1. Dividing by
// the analytic v_1 makes this variant meromorphic, as Newton refinement and
// Cauchy-Riemann checks require; zeros of v_1 turn into poles, which repel
// the iteration instead of breaking differentiability.
cplx shooting_residual_analytic(double epsilon, cplx lambda, std::size_t start = 0);

// Start index at which F is self-consistent across the given interval of
// real lambda (probed at the ends and midpoint, then doubled).
std::size_t shooting_start_index(double epsilon, double lo, double hi);

// Sign-change bracketing plus bisection refinement of the real restriction
// of F on [lo, hi]; roots sorted and deduplicated at 1e-10 spacing.
std::vector<double> find_real_roots(double epsilon, double lo, double hi,
                                    std::size_t seeds);

// Newton refinement of F from every node of an nre x nim grid over the given
// rectangle; converged roots are clustered, non-converged seeds counted.
ScanResult complex_scan(double epsilon, double re_lo, double re_hi, double im_lo,
                        double im_hi, std::size_t nre, std::size_t nim);

// Compensated evaluation of the generating function sum v_k z^k, with a
// power-law tail bound for the truncated remainder. Requires |z| <= 1.
GenEval generating_eval(const CoefficientSequence& v, cplx z);

// Maximum relative residual of the eigen-equation identity
//   (eps/2) n(n+1) v_{n+1} + (lambda-n) v_n - (eps/2) n(n-1) v_{n-1} = 0
// over interior indices n >= 2, plus the n=1 initial-condition residual
// |eps v_2 - (1-lambda) v_1|. Rows whose scale underflows are skipped.
// Zero (to roundoff) certifies that the generating function solves the ODE.
double ode_residual(const CoefficientSequence& v);

}  // namespace bos
