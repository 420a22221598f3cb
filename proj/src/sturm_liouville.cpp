#include "bos/sturm_liouville.hpp"

#include <algorithm>
#include <cmath>

#include "bos/operator_core.hpp"

namespace bos {

namespace {

// Jacobi polynomial P_n^(alpha,beta)(x) and derivative by the three-term
// recurrence.
double jacobi_p(std::size_t n, double al, double be, double x) {
  if (n == 0) return 1.0;
  double pm1 = 1.0;
  double p = 0.5 * (al - be + (al + be + 2.0) * x);
  for (std::size_t k = 2; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double a1 = 2.0 * kk * (kk + al + be) * (2.0 * kk + al + be - 2.0);
    const double a2 = (2.0 * kk + al + be - 1.0) * (al * al - be * be);
    const double a3 = (2.0 * kk + al + be - 1.0) * (2.0 * kk + al + be) *
                      (2.0 * kk + al + be - 2.0);
    const double a4 = 2.0 * (kk + al - 1.0) * (kk + be - 1.0) * (2.0 * kk + al + be);
    const double next = ((a2 + a3 * x) * p - a4 * pm1) / a1;
    pm1 = p;
    p = next;
  }
  return p;
}

double jacobi_dp(std::size_t n, double al, double be, double x) {
  if (n == 0) return 0.0;
  // (2n+al+be)(1-x^2) P_n' = n(al-be-(2n+al+be)x) P_n + 2(n+al)(n+be) P_{n-1}
  const double nn = static_cast<double>(n);
  const double b = 2.0 * nn + al + be;
  return (nn * (al - be - b * x) * jacobi_p(n, al, be, x) +
          2.0 * (nn + al) * (nn + be) * jacobi_p(n - 1, al, be, x)) /
         (b * (1.0 - x * x));
}

// Legendre value and derivative at x in [-1,1] for j = 0..count-1, filled
// into preallocated rows of length `count`.
void legendre_all(double x, std::size_t count, double* p, double* dp) {
  if (count == 0) return;
  p[0] = 1.0;
  dp[0] = 0.0;
  if (count > 1) {
    p[1] = x;
    dp[1] = 1.0;
  }
  for (std::size_t j = 1; j + 1 < count; ++j) {
    const double jj = static_cast<double>(j);
    p[j + 1] = ((2.0 * jj + 1.0) * x * p[j] - jj * p[j - 1]) / (jj + 1.0);
    dp[j + 1] = dp[j - 1] + (2.0 * jj + 1.0) * p[j];
  }
}

// Dense Cholesky, lower factor in place (row-major). Reports breakdown.
void cholesky(std::vector<double>& a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) {
      throw numerical_error("mass matrix Cholesky factorization broke down",
                            static_cast<long>(j));
    }
    const double lj = std::sqrt(d);
    a[j * n + j] = lj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / lj;
    }
    for (std::size_t k = j + 1; k < n; ++k) a[j * n + k] = 0.0;
  }
}

// Cyclic Jacobi eigenvalue iteration for a dense symmetric matrix, with
// accumulated rotations. On return d holds the eigenvalues ascending and the
// columns of v the matching eigenvectors. Robust and accurate at the modest
// dimensions used here (K <= a few hundred).
void sym_eigen(std::vector<double>& a, std::size_t n, std::vector<double>& d,
               std::vector<double>& v) {
  v.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
    }
    return std::sqrt(2.0 * s);
  };
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a[i * n + i]));
  for (double x : a) scale = std::max(scale, std::abs(x));
  const double tol = 1e-15 * std::max(scale, 1e-300);

  for (int sweep = 0; sweep < 60; ++sweep) {
    if (off_norm() <= tol * static_cast<double>(n)) break;
    if (sweep == 59) {
      throw numerical_error("Jacobi eigenvalue iteration failed to converge");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::abs(apq) <= 1e-18 * scale) continue;
        const double app = a[p * n + p], aqq = a[q * n + q];
        const double theta = 0.5 * (aqq - app) / apq;
        const double t = ((theta >= 0.0) ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  d.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i * n + i];
  // sort ascending, carrying columns
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t k = i;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (d[j] < d[k]) k = j;
    }
    if (k != i) {
      std::swap(d[k], d[i]);
      for (std::size_t row = 0; row < n; ++row) {
        std::swap(v[row * n + k], v[row * n + i]);
      }
    }
  }
}

struct Assembled {
  std::vector<double> stiffness, mass;
};

Assembled assemble_with_rule(double epsilon, std::size_t k, const QuadratureRule& q) {
  const double inv = 1.0 / epsilon;
  const std::size_t nq = q.nodes.size();
  // Basis data at nodes: rows j hold phi_j' and P_j.
  std::vector<double> p(k), dp(k);
  std::vector<double> php(k * nq), pl(k * nq);
  std::vector<double> wt_s(nq), wt_m(nq);
  for (std::size_t iq = 0; iq < nq; ++iq) {
    const double z = q.nodes[iq];
    const double x = 2.0 * z - 1.0;
    legendre_all(x, k, p.data(), dp.data());
    for (std::size_t j = 0; j < k; ++j) {
      pl[j * nq + iq] = p[j];
      php[j * nq + iq] = p[j] + 2.0 * z * dp[j];  // phi_j'(z)
    }
    // stiffness: p phi' phi' = (1-z)^(1/eps) * (1-z)(1+z)^(1-1/eps) phi' phi'
    wt_s[iq] = q.weights[iq] * (1.0 - z) * std::exp((1.0 - inv) * std::log1p(z));
    // mass: w phi phi = (1-z)^(1/eps) * z (1+z)^(-1/eps) P_i P_j
    wt_m[iq] = q.weights[iq] * z * std::exp(-inv * std::log1p(z));
  }
  Assembled out;
  out.stiffness.assign(k * k, 0.0);
  out.mass.assign(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      double s = 0.0, m = 0.0;
      for (std::size_t iq = 0; iq < nq; ++iq) {
        s += wt_s[iq] * php[i * nq + iq] * php[j * nq + iq];
        m += wt_m[iq] * pl[i * nq + iq] * pl[j * nq + iq];
      }
      out.stiffness[i * k + j] = out.stiffness[j * k + i] = s;
      out.mass[i * k + j] = out.mass[j * k + i] = m;
    }
  }
  return out;
}

}  // namespace

QuadratureRule gauss_jacobi_01(std::size_t n, double alpha) {
  if (n == 0) throw std::invalid_argument("quadrature rule needs at least one node");
  const double be = 0.0;
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on P_n^(alpha,0) from trigonometric initial guesses.
  // Weight constant: 2^(al+be+1) G(n+al+1) G(n+be+1) / (G(n+al+be+1) n!).
  const double dn = static_cast<double>(n);
  const double lg = std::lgamma(dn + alpha + 1.0) + std::lgamma(dn + be + 1.0) -
                    std::lgamma(dn + alpha + be + 1.0) - std::lgamma(dn + 1.0);
  const double norm_c = std::pow(2.0, alpha + be + 1.0) * std::exp(lg);
  for (std::size_t i = 1; i <= n; ++i) {
    double x = std::cos(M_PI * (0.5 * alpha + static_cast<double>(i) - 0.25) /
                        (0.5 * (1.0 + alpha + be) + static_cast<double>(n)));
    double pn = 1.0, dpn = 1.0;
    for (int it = 0; it < 100; ++it) {
      pn = jacobi_p(n, alpha, be, x);
      dpn = jacobi_dp(n, alpha, be, x);
      const double dx = pn / dpn;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    dpn = jacobi_dp(n, alpha, be, x);
    const double w = norm_c / ((1.0 - x * x) * dpn * dpn);
    // map (-1,1) with weight (1-x)^alpha to (0,1) with weight (1-z)^alpha
    rule.nodes[i - 1] = 0.5 * (x + 1.0);
    rule.weights[i - 1] = w * std::pow(2.0, -alpha - 1.0);
  }
  std::sort(rule.nodes.begin(), rule.nodes.end());
  // weights were computed per root; recompute in sorted order
  for (std::size_t i = 0; i < n; ++i) {
    const double x = 2.0 * rule.nodes[i] - 1.0;
    const double dpn = jacobi_dp(n, alpha, be, x);
    rule.weights[i] = norm_c / ((1.0 - x * x) * dpn * dpn) * std::pow(2.0, -alpha - 1.0);
  }
  return rule;
}

SturmLiouvilleSystem assemble(double epsilon, std::size_t k) {
  validate_epsilon(epsilon);
  if (k == 0) throw std::invalid_argument("Galerkin dimension must be positive");
  const double alpha = 1.0 / epsilon;

  std::size_t nq = k + 40;
  Assembled cur = assemble_with_rule(epsilon, k, gauss_jacobi_01(nq, alpha));
  double err = 0.0;
  std::size_t worst = 0;
  for (int round = 0; round < 3; ++round) {
    const Assembled next = assemble_with_rule(epsilon, k, gauss_jacobi_01(2 * nq, alpha));
    double scale = 0.0;
    for (double v : next.stiffness) scale = std::max(scale, std::abs(v));
    for (double v : next.mass) scale = std::max(scale, std::abs(v));
    err = 0.0;
    for (std::size_t idx = 0; idx < k * k; ++idx) {
      const double ds = std::abs(cur.stiffness[idx] - next.stiffness[idx]);
      const double dm = std::abs(cur.mass[idx] - next.mass[idx]);
      if (std::max(ds, dm) > err) {
        err = std::max(ds, dm);
        worst = idx;
      }
    }
    err /= scale;
    cur = next;
    nq *= 2;
    if (err <= 1e-12) break;
  }
  if (err > 1e-12) {
    throw numerical_error("quadrature did not converge under refinement; worst entry " +
                              std::to_string(worst / k) + "," + std::to_string(worst % k),
                          static_cast<long>(worst));
  }

  SturmLiouvilleSystem sys;
  sys.epsilon = epsilon;
  sys.dim = k;
  sys.stiffness = std::move(cur.stiffness);
  sys.mass = std::move(cur.mass);
  sys.quad_points = nq;
  sys.quad_refinement_error = err;
  return sys;
}

std::vector<SLMode> sl_eigenpairs(const SturmLiouvilleSystem& sys, std::size_t count) {
  const std::size_t n = sys.dim;
  if (count > n) throw std::invalid_argument("requested more eigenvalues than dimension");
  // Reduce stiffness c = mu mass c with mass = L L^T to the standard problem
  // (L^-1 S L^-T) y = mu y, y = L^T c.
  std::vector<double> l = sys.mass;
  cholesky(l, n);
  // B = L^-1 S: forward substitution on columns of S; then C = B L^-T by
  // forward substitution on rows.
  std::vector<double> b = sys.stiffness;
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[i * n + col];
      for (std::size_t k2 = 0; k2 < i; ++k2) s -= l[i * n + k2] * b[k2 * n + col];
      b[i * n + col] = s / l[i * n + i];
    }
  }
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = b[row * n + j];
      for (std::size_t k2 = 0; k2 < j; ++k2) s -= l[j * n + k2] * b[row * n + k2];
      b[row * n + j] = s / l[j * n + j];
    }
  }
  // enforce exact symmetry before the symmetric solver
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (b[i * n + j] + b[j * n + i]);
      b[i * n + j] = b[j * n + i] = avg;
    }
  }
  std::vector<double> d, v;
  sym_eigen(b, n, d, v);

  std::vector<SLMode> modes(count);
  for (std::size_t m = 0; m < count; ++m) {
    modes[m].mu = d[m];
    // c = L^-T y, back substitution
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = v[i * n + m];
    for (std::size_t i = n; i-- > 0;) {
      double s = c[i];
      for (std::size_t k2 = i + 1; k2 < n; ++k2) s -= l[k2 * n + i] * c[k2];
      c[i] = s / l[i * n + i];
    }
    modes[m].coeffs = std::move(c);
  }
  return modes;
}

std::vector<double> sl_spectrum(const SturmLiouvilleSystem& sys, std::size_t count) {
  std::vector<SLMode> modes = sl_eigenpairs(sys, count);
  std::vector<double> mu(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) mu[i] = modes[i].mu;
  return mu;
}

double lambda_from_mu(double epsilon, double mu) { return 0.5 * epsilon * mu; }

double weighted_norm_sq(const std::vector<double>& coeffs,
                        const SturmLiouvilleSystem& sys) {
  if (coeffs.size() != sys.dim) {
    throw std::invalid_argument("coefficient vector length must equal the dimension");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < sys.dim; ++i) {
    for (std::size_t j = 0; j < sys.dim; ++j) {
      s += coeffs[i] * sys.mass[i * sys.dim + j] * coeffs[j];
    }
  }
  return s;
}

double sl_basis_value(std::size_t j, double z) {
  const double x = 2.0 * z - 1.0;
  std::vector<double> p(j + 1), dp(j + 1);
  legendre_all(x, j + 1, p.data(), dp.data());
  return z * p[j];
}

double sl_basis_derivative(std::size_t j, double z) {
  const double x = 2.0 * z - 1.0;
  std::vector<double> p(j + 1), dp(j + 1);
  legendre_all(x, j + 1, p.data(), dp.data());
  return p[j] + 2.0 * z * dp[j];
}

}  // namespace bos
