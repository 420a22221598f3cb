#include "bos/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bos {

void validate_epsilon(double eps) {
  if (!(eps > 0.0 && eps < 2.0)) {
    throw std::invalid_argument("epsilon must lie in the open interval (0,2), got " +
                                std::to_string(eps));
  }
}

bool is_resonant(double eps, double tol) {
  const double inv = 1.0 / eps;
  return std::abs(inv - std::round(inv)) <= tol;
}

EpsilonParam::EpsilonParam(double eps) : value(eps) { validate_epsilon(eps); }

void EpsilonParam::require_nonresonant(double tol) const {
  if (is_resonant(value, tol)) {
    const long k = static_cast<long>(std::llround(1.0 / value));
    throw std::invalid_argument("1/epsilon is within tolerance of the integer " +
                                std::to_string(k) +
                                "; the reality theorem and the z=1 Frobenius exponents "
                                "require 1/epsilon to be non-integer");
  }
}

double TridiagonalOperator::row_norm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    double s = std::abs(diag[i]);
    if (i > 0) s += std::abs(sub[i - 1]);
    if (i + 1 < size) s += std::abs(sup[i]);
    best = std::max(best, s);
  }
  return best;
}

double HeunParams::fuchsian_defect() const {
  return (gamma + delta + eps_h) - (alpha + beta + 1.0);
}

double entry_sub(double epsilon, long n) {
  if (n < 1) throw std::invalid_argument("entry_sub requires n >= 1");
  return 0.5 * epsilon * static_cast<double>(n) * static_cast<double>(n - 1);
}

double entry_sup(double epsilon, long n) {
  if (n < 1) throw std::invalid_argument("entry_sup requires n >= 1");
  return -0.5 * epsilon * static_cast<double>(n) * static_cast<double>(n + 1);
}

TridiagonalOperator build_truncated(double epsilon, std::size_t n) {
  validate_epsilon(epsilon);
  if (n == 0) throw std::invalid_argument("truncation size must be positive");
  TridiagonalOperator t;
  t.size = n;
  t.epsilon = epsilon;
  t.diag.resize(n);
  t.sub.resize(n - 1);
  t.sup.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const long row = static_cast<long>(i) + 1;
    t.diag[i] = static_cast<double>(row);
    if (i + 1 < n) {
      t.sup[i] = entry_sup(epsilon, row);
      t.sub[i] = entry_sub(epsilon, row + 1);
    }
  }
  return t;
}

HeunParams heun_parameters(double epsilon, cplx lambda) {
  validate_epsilon(epsilon);
  HeunParams h;
  h.alpha = 1.0;
  h.beta = 0.0;
  h.gamma = 0.0;
  h.delta = 1.0 + 1.0 / epsilon;
  h.eps_h = 1.0 - 1.0 / epsilon;
  h.a = -1.0;
  h.mu = 2.0 * lambda / epsilon;
  h.epsilon = epsilon;
  return h;
}

double SLCoefficients::p(double z) const {
  if (z == 0.0) return 1.0;
  if (z == 1.0) return 0.0;
  const double inv = 1.0 / epsilon;
  return std::exp((1.0 + inv) * std::log1p(-z) + (1.0 - inv) * std::log1p(z));
}

double SLCoefficients::q(double) const { return 0.0; }

double SLCoefficients::w(double z) const {
  if (z == 0.0) {
    throw std::domain_error("w(z) has a pole of order 1 at z = 0");
  }
  return zw(z) / z;
}

double SLCoefficients::zw(double z) const {
  const double inv = 1.0 / epsilon;
  return std::exp(inv * (std::log1p(-z) - std::log1p(z)));
}

SLCoefficients sl_coefficients(double epsilon) {
  validate_epsilon(epsilon);
  return SLCoefficients{epsilon};
}

TridiagonalOperator reflect_minus(const TridiagonalOperator& t) {
  // Row -n of A reads (eps/2)(-n)(-n-1) v_{-n-1} - (eps/2)(-n)(-n+1) v_{-n+1}
  // + (-n) v_{-n}. Under -n -> n the neighbour -n-1 becomes n+1, so row n of
  // the result has diagonal -n, super +(eps/2) n(n+1), sub -(eps/2) n(n-1).
  TridiagonalOperator r;
  r.size = t.size;
  r.epsilon = t.epsilon;
  r.diag.resize(t.size);
  r.sub.resize(t.size > 0 ? t.size - 1 : 0);
  r.sup.resize(t.size > 0 ? t.size - 1 : 0);
  for (std::size_t i = 0; i < t.size; ++i) {
    const double n = static_cast<double>(i + 1);
    r.diag[i] = -n;
    if (i + 1 < t.size) {
      r.sup[i] = 0.5 * t.epsilon * n * (n + 1.0);
      r.sub[i] = -0.5 * t.epsilon * (n + 1.0) * n;  // row n+1, column n
    }
  }
  return r;
}

}  // namespace bos
