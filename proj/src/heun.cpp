#include "bos/heun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bos {

namespace {

using Poly = std::vector<cplx>;  // ascending coefficients

// p(1 - t) expanded in t.
Poly compose_one_minus(const Poly& p) {
  Poly q(p.size(), cplx(0.0));
  for (std::size_t j = 0; j < p.size(); ++j) {
    // (1-t)^j = sum_k C(j,k) (-t)^k
    double binom = 1.0;
    for (std::size_t k = 0; k <= j; ++k) {
      q[k] += p[j] * binom * ((k % 2 == 0) ? 1.0 : -1.0);
      binom = binom * static_cast<double>(j - k) / static_cast<double>(k + 1);
    }
  }
  return q;
}

// Local polynomials of the Heun operator at the chosen center, in the
// variable t = z (center 0) or t = 1-z (center 1).
std::array<Poly, 3> local_ode(const HeunParams& h, int center) {
  const double a = h.a;
  Poly p2 = {cplx(0.0), cplx(a), cplx(-(1.0 + a)), cplx(1.0)};  // z(z-1)(z-a)
  Poly p1 = {cplx(h.gamma * a),
             cplx(-h.gamma * (1.0 + a) - h.delta * a - h.eps_h),
             cplx(h.gamma + h.delta + h.eps_h)};
  Poly p0 = {-h.mu, cplx(h.alpha * h.beta)};
  if (center == 0) return {p2, p1, p0};
  // z = 1 - t flips the sign of d/dz.
  Poly q2 = compose_one_minus(p2);
  Poly q1 = compose_one_minus(p1);
  for (cplx& c : q1) c = -c;
  Poly q0 = compose_one_minus(p0);
  return {q2, q1, q0};
}

// Coefficients of the Frobenius solution t^rho sum c_j t^j of
// q2 u'' + q1 u' + q0 u = 0 about the regular singular point t = 0.
std::vector<cplx> frobenius_coeffs(const std::array<Poly, 3>& q, double rho,
                                   std::size_t k) {
  const Poly& q2 = q[0];
  const Poly& q1 = q[1];
  const Poly& q0 = q[2];
  auto indicial = [&](double sigma) {
    return q2[1] * sigma * (sigma - 1.0) + q1[0] * sigma;
  };
  std::vector<cplx> c(k, cplx(0.0));
  c[0] = cplx(1.0);
  for (std::size_t next = 1; next < k; ++next) {
    const std::size_t qi = next - 1;  // power index rho + qi
    cplx rhs(0.0);
    for (std::size_t j = (qi >= 2 ? qi - 2 : 0); j <= qi; ++j) {
      const double sj = rho + static_cast<double>(j);
      cplx coeff(0.0);
      const std::size_t m2 = qi - j + 2, m1 = qi - j + 1, m0 = qi - j;
      if (m2 < q2.size()) coeff += q2[m2] * sj * (sj - 1.0);
      if (m1 < q1.size()) coeff += q1[m1] * sj;
      if (m0 < q0.size()) coeff += q0[m0];
      rhs += coeff * c[j];
    }
    const cplx denom = indicial(rho + static_cast<double>(next));
    if (std::abs(denom) < 1e-13 * (1.0 + std::abs(rhs))) {
      throw numerical_error("resonant indicial value in Frobenius recursion",
                            static_cast<long>(next));
    }
    c[next] = -rhs / denom;
  }
  return c;
}

}  // namespace

cplx FrobeniusSeries::local_variable(cplx z) const {
  return (center == 0.0) ? z : cplx(1.0) - z;
}

namespace {

cplx series_sum(const std::vector<cplx>& c, cplx t) {
  cplx sum(0.0), tp(1.0);
  int tiny_streak = 0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    const cplx term = c[j] * tp;
    sum += term;
    tp *= t;
    if (j >= 8 && std::abs(term) <= 1e-14 * std::abs(sum)) {
      if (++tiny_streak >= 2) break;  // zero coefficients occur; need two in a row
    } else {
      tiny_streak = 0;
    }
  }
  return sum;
}

// value, first and second derivative of sum c_j t^(rho+j)
void series_derivs(const std::vector<cplx>& c, double rho, cplx t, cplx& u, cplx& du,
                   cplx& ddu) {
  u = du = ddu = cplx(0.0);
  const cplx logt = std::log(t);
  for (std::size_t j = 0; j < c.size(); ++j) {
    const double s = rho + static_cast<double>(j);
    const cplx ts = std::exp(s * logt);
    u += c[j] * ts;
    du += c[j] * s * ts / t;
    ddu += c[j] * s * (s - 1.0) * ts / (t * t);
  }
}

}  // namespace

cplx FrobeniusSeries::eval(cplx z) const {
  const cplx t = local_variable(z);
  cplx head;
  if (exponent == 0.0) {
    head = cplx(1.0);
  } else if (exponent == 1.0) {
    head = t;
  } else {
    head = std::exp(exponent * std::log(t));
  }
  cplx value = head * series_sum(coeffs, t);
  if (log_coeff != cplx(0.0)) {
    value += log_coeff * std::log(t) * series_sum(log_series, t);
  }
  return value;
}

double FrobeniusSeries::ode_residual_at(cplx z) const {
  const cplx t = local_variable(z);
  cplx u, du, ddu;
  series_derivs(coeffs, exponent, t, u, du, ddu);
  if (log_coeff != cplx(0.0)) {
    cplx w, dw, ddw;
    series_derivs(log_series, 0.0, t, w, dw, ddw);
    const cplx lt = std::log(t);
    u += log_coeff * lt * w;
    du += log_coeff * (w / t + lt * dw);
    ddu += log_coeff * (-w / (t * t) + 2.0 * dw / t + lt * ddw);
  }
  auto horner = [&](const Poly& p) {
    cplx v(0.0);
    for (std::size_t j = p.size(); j-- > 0;) v = v * t + p[j];
    return v;
  };
  const cplx r2 = horner(ode[0]) * ddu;
  const cplx r1 = horner(ode[1]) * du;
  const cplx r0 = horner(ode[2]) * u;
  const double scale = std::abs(r2) + std::abs(r1) + std::abs(r0);
  if (scale == 0.0) return 0.0;
  return std::abs(r2 + r1 + r0) / scale;
}

FrobeniusSeries series_at_0(const HeunParams& params, std::size_t k) {
  if (k < 4) throw std::invalid_argument("series_at_0 requires K >= 4");
  FrobeniusSeries s;
  s.center = 0.0;
  s.exponent = 1.0;  // the other root of the indicial equation is 0; that
                     // branch differs by an integer and may be logarithmic
  s.radius = 1.0;
  s.ode = local_ode(params, 0);
  s.coeffs = frobenius_coeffs(s.ode, s.exponent, k);
  return s;
}

FrobeniusSeries series_at_1(const HeunParams& params, BranchAt1 branch, std::size_t k) {
  if (k < 4) throw std::invalid_argument("series_at_1 requires K >= 4");
  if (branch == BranchAt1::kRegular) {
    // The exponent-0 recursion never hits the indicial root -1/eps < 0, so
    // this branch exists for every epsilon in (0,2).
    FrobeniusSeries s;
    s.center = 1.0;
    s.exponent = 0.0;
    s.radius = 1.0;
    s.ode = local_ode(params, 1);
    s.coeffs = frobenius_coeffs(s.ode, s.exponent, k);
    return s;
  }
  EpsilonParam(params.epsilon).require_nonresonant();
  FrobeniusSeries s;
  s.center = 1.0;
  s.exponent = -1.0 / params.epsilon;
  s.radius = 1.0;
  s.ode = local_ode(params, 1);
  s.coeffs = frobenius_coeffs(s.ode, s.exponent, k);
  return s;
}

FrobeniusSeries series_at_1_log(const HeunParams& params, std::size_t k) {
  if (k < 4) throw std::invalid_argument("series_at_1_log requires K >= 4");
  if (!is_resonant(params.epsilon)) {
    throw std::invalid_argument("series_at_1_log applies only when 1/epsilon is an "
                                "integer; use series_at_1 otherwise");
  }
  const long m = std::llround(1.0 / params.epsilon);
  if (m < 1 || static_cast<std::size_t>(m) + 2 > k) {
    throw std::invalid_argument("series_at_1_log needs K > 1/epsilon + 1");
  }

  FrobeniusSeries s;
  s.center = 1.0;
  s.exponent = -static_cast<double>(m);
  s.radius = 1.0;
  s.ode = local_ode(params, 1);
  s.log_series = frobenius_coeffs(s.ode, 0.0, k);  // the analytic branch u1

  const Poly& q2 = s.ode[0];
  const Poly& q1 = s.ode[1];
  const Poly& q0 = s.ode[2];
  // G = L[log(t) u1] = 2 qt2 u1' + (q1 - qt2) u1 / t with qt2 = q2 / t;
  // Laurent coefficients G_k for k >= -1.
  Poly qt2(q2.begin() + 1, q2.end());
  Poly diff(std::max(q1.size(), qt2.size()), cplx(0.0));
  for (std::size_t r = 0; r < q1.size(); ++r) diff[r] += q1[r];
  for (std::size_t r = 0; r < qt2.size(); ++r) diff[r] -= qt2[r];
  auto g_at = [&](long kk) {
    cplx g(0.0);
    for (std::size_t r = 0; r < 3; ++r) {
      const long sidx = kk + 1 - static_cast<long>(r);
      if (sidx < 0 || sidx >= static_cast<long>(s.log_series.size())) continue;
      const cplx as = s.log_series[static_cast<std::size_t>(sidx)];
      cplx w(0.0);
      if (r < qt2.size()) w += 2.0 * static_cast<double>(sidx) * qt2[r];
      if (r < diff.size()) w += diff[r];
      g += as * w;
    }
    return g;
  };

  const double rho = s.exponent;
  auto indicial = [&](double sigma) {
    return q2[1] * sigma * (sigma - 1.0) + q1[0] * sigma;
  };
  std::vector<cplx> c(k, cplx(0.0));
  c[0] = cplx(1.0);
  cplx log_c(0.0);
  for (std::size_t next = 1; next < k; ++next) {
    const std::size_t qi = next - 1;
    cplx rhs(0.0);
    for (std::size_t j = (qi >= 2 ? qi - 2 : 0); j <= qi; ++j) {
      const double sj = rho + static_cast<double>(j);
      cplx coeff(0.0);
      const std::size_t m2 = qi - j + 2, m1 = qi - j + 1, m0 = qi - j;
      if (m2 < q2.size()) coeff += q2[m2] * sj * (sj - 1.0);
      if (m1 < q1.size()) coeff += q1[m1] * sj;
      if (m0 < q0.size()) coeff += q0[m0];
      rhs += coeff * c[j];
    }
    const long gk = static_cast<long>(qi) - m;  // log part feeds power rho + qi
    if (gk >= -1) rhs += log_c * g_at(gk);
    if (next == static_cast<std::size_t>(m)) {
      // resonant index: the c_m coefficient drops out; this equation fixes
      // the log amplitude instead, and c_m = 0 normalizes the u1 admixture
      const cplx gm1 = g_at(-1);
      if (std::abs(gm1) < 1e-14) {
        throw numerical_error("resonance is log-free here; series_at_1 suffices");
      }
      log_c = -rhs / gm1;
      c[next] = cplx(0.0);
      continue;
    }
    const cplx denom = indicial(rho + static_cast<double>(next));
    if (std::abs(denom) < 1e-13 * (1.0 + std::abs(rhs))) {
      throw numerical_error("unexpected second resonance in log-augmented series",
                            static_cast<long>(next));
    }
    c[next] = -rhs / denom;
  }
  s.coeffs = std::move(c);
  s.log_coeff = log_c;
  return s;
}

FrobeniusSeries singular_solution_at_1(const HeunParams& params, std::size_t k) {
  if (is_resonant(params.epsilon)) return series_at_1_log(params, k);
  return series_at_1(params, BranchAt1::kSingular, k);
}

std::vector<cplx> overlap_circle(std::size_t count) {
  std::vector<cplx> pts(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double th = 2.0 * M_PI * (static_cast<double>(i) + 0.5) /
                      static_cast<double>(count);
    pts[i] = cplx(0.5 + 0.25 * std::cos(th), 0.25 * std::sin(th));
  }
  return pts;
}

ConnectionFit connection_fit(const std::vector<cplx>& u, const std::vector<cplx>& u1,
                             const std::vector<cplx>& u2) {
  const std::size_t m = u.size();
  if (m < 8 || u1.size() != m || u2.size() != m) {
    throw std::invalid_argument("connection_fit requires >= 8 matching sample points");
  }
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    s1 += std::norm(u1[i]);
    s2 += std::norm(u2[i]);
  }
  s1 = std::sqrt(s1 / static_cast<double>(m));
  s2 = std::sqrt(s2 / static_cast<double>(m));
  if (s1 == 0.0 || s2 == 0.0) {
    throw numerical_error("connection_fit received an identically zero column");
  }
  // Normal equations of the equilibrated m x 2 system [u1/s1 u2/s2]. The 2x2
  // Hermitian Gram matrix is solved in closed form; its eigenvalues give the
  // squared singular values for the condition estimate.
  cplx g11(0.0), g12(0.0), g22(0.0), r1(0.0), r2(0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const cplx c1 = u1[i] / s1, c2 = u2[i] / s2;
    g11 += std::conj(c1) * c1;
    g12 += std::conj(c1) * c2;
    g22 += std::conj(c2) * c2;
    r1 += std::conj(c1) * u[i];
    r2 += std::conj(c2) * u[i];
  }
  const double tr = g11.real() + g22.real();
  const double det_h = g11.real() * g22.real() - std::norm(g12);
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det_h));
  const double s_max = 0.5 * tr + disc;
  const double s_min = std::max(0.0, 0.5 * tr - disc);
  ConnectionFit fit;
  fit.cond = (s_min > 0.0) ? std::sqrt(s_max / s_min)
                           : std::numeric_limits<double>::infinity();
  if (!(fit.cond <= 1e8)) {
    throw numerical_error("connection_fit sample matrix is ill-conditioned; "
                          "u1 and u2 are numerically dependent on the sample");
  }
  const cplx det = g11 * g22 - g12 * std::conj(g12);
  const cplx a_eq = (g22 * r1 - g12 * r2) / det;
  const cplx b_eq = (g11 * r2 - std::conj(g12) * r1) / det;
  fit.a = a_eq / s1;
  fit.b = b_eq / s2;
  fit.b_over_a = std::abs(b_eq) / std::abs(a_eq);

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    num += std::norm(u[i] - fit.a * u1[i] - fit.b * u2[i]);
    den += std::norm(u[i]);
  }
  fit.residual = (den > 0.0) ? std::sqrt(num / den) : std::sqrt(num);
  return fit;
}

}  // namespace bos
