#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "bos/operator_core.hpp"
#include "bos/types.hpp"

namespace bos {

// Frobenius series u(z) = t^exponent * sum_j coeffs[j] t^j about a regular
// singular point, where t = z for center 0 and t = 1-z for center 1 (so that
// t is positive on (0,1) and real-branch powers apply). The local ODE
// polynomials q2 u'' + q1 u' + q0 u = 0 (in t) are kept for residual checks.
struct FrobeniusSeries {
  double center = 0.0;  // 0 or 1
  double exponent = 0.0;
  std::vector<cplx> coeffs;  // c_0 = 1
  double radius = 1.0;       // nearest other singularity of {0, 1, -1, inf}
  std::array<std::vector<cplx>, 3> ode;  // q2, q1, q0, ascending in t

  // Logarithmic part C log(t) u1(t), present only when the exponents at the
  // center differ by an integer and the pure power ansatz fails.
  cplx log_coeff = cplx(0.0);
  std::vector<cplx> log_series;  // coefficients of the analytic branch u1

  // Value at z; powers use the principal branch (real on t > 0).
  // Terms beyond the point where they stop contributing at 1e-14 relative
  // are dropped.
  cplx eval(cplx z) const;
  cplx local_variable(cplx z) const;

  // Relative residual of the local ODE at z, from termwise derivatives of
  // the truncated series.
  double ode_residual_at(cplx z) const;
};

// Connection constants of u = a u1 + b u2 on an overlap sample. The system
// is solved with both columns scaled to unit RMS over the sample, which
// keeps the conditioning flat in lambda; a and b are reported in the
// caller's basis, and b_over_a is the scale-free certificate |b|/|a| of the
// equilibrated solve (the natural measure of singular-branch content, since
// u2 itself is only defined up to a scalar).
struct ConnectionFit {
  cplx a;
  cplx b;
  double b_over_a = 0.0;
  double cond = 0.0;      // condition number of the equilibrated sample matrix
  double residual = 0.0;  // relative least-squares misfit
};

// Exponent-1 solution at z=0 (the generating-function branch). Normalized to
// c_0 = 1, its coefficients reproduce the recurrence module's v_k. The
// exponent-0 branch is not constructed: the exponents {0,1} differ by an
// integer, so that branch may carry logarithms. Requires K >= 4.
FrobeniusSeries series_at_0(const HeunParams& params, std::size_t k);

enum class BranchAt1 {
  kRegular,   // exponent 0; finite at z=1
  kSingular,  // exponent -1/eps; blows up at z=1
};

// Frobenius solution about z=1 in the variable 1-z. Requires non-resonant
// epsilon (1/eps off integers by 1e-9) and K >= 4; resonant values are
// rejected with a diagnostic naming the integer.
FrobeniusSeries series_at_1(const HeunParams& params, BranchAt1 branch, std::size_t k);

// Singular solution at z=1 when 1/eps is an integer m: the exponents {0, -m}
// differ by an integer and generically the second solution carries a log,
//   u2 = t^(-m) sum_j c_j t^j + C log(t) u1(t),   t = 1 - z,
// with c_m = 0 as normalization of the mixing freedom. Still blows up at
// z=1, so the connection argument is unchanged.
FrobeniusSeries series_at_1_log(const HeunParams& params, std::size_t k);

// The singular branch at z=1 for any epsilon: plain Frobenius when
// non-resonant, log-augmented when resonant.
FrobeniusSeries singular_solution_at_1(const HeunParams& params, std::size_t k);

// Sample points for the connection fit: `count` points on the circle
// |z - 0.5| = 0.25, inside the overlap of the unit discs about 0 and 1
// with margin >= 0.2 from both circles.
std::vector<cplx> overlap_circle(std::size_t count = 12);

// Least-squares fit of u = a u1 + b u2 over sample values. Requires at least
// 8 points; a condition number above 1e8 signals ill-chosen samples via
// numerical_error. At an eigenvalue |b|/|a| certifies the vanishing of the
// singular-branch coefficient.
ConnectionFit connection_fit(const std::vector<cplx>& u, const std::vector<cplx>& u1,
                             const std::vector<cplx>& u2);

}  // namespace bos
