#include "bos/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace bos {

namespace {

constexpr double kEps = 2.220446049250313e-16;

// Implicit-shift QL for a complex symmetric tridiagonal matrix (d, e).
// Rotations are complex orthogonal (c^2 + s^2 = 1), which preserves complex
// symmetry and hence tridiagonal form, so a sweep costs O(window). The
// matrix here is graded upward (entries grow like eps*n^2/2), which is the
// favourable direction for QL. Near-breakdown of a rotation (f^2+g^2 ~ 0)
// is handled by retrying the sweep with a perturbed shift.
void csym_tridiag_ql(std::vector<cplx>& d, std::vector<cplx>& e) {
  const std::size_t n = d.size();
  if (n == 0) return;
  e.resize(n, cplx(0.0));  // e[n-1] acts as a sentinel zero
  constexpr int max_iter = 80;

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    double shift_kick = 0.0;
    for (;;) {
      std::size_t m = l;
      while (m + 1 < n) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= kEps * dd) break;
        ++m;
      }
      if (m == l) break;
      if (++iter > max_iter) {
        throw numerical_error("QL iteration failed to converge", static_cast<long>(l));
      }

      // Wilkinson-style shift from the leading 2x2 of the window.
      cplx g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      cplx r = std::sqrt(g * g + 1.0);
      const cplx gp = g + r, gm = g - r;
      g = d[m] - d[l] + e[l] / (std::abs(gp) >= std::abs(gm) ? gp : gm);
      if (shift_kick != 0.0) {
        g *= (1.0 + shift_kick);
        shift_kick = 0.0;
      }
      if (iter % 14 == 0) g *= (1.0 + 0.05 * iter);  // exceptional shift

      cplx s(1.0), c(1.0), p(0.0);
      bool breakdown = false;
      for (std::size_t i = m; i-- > l;) {
        cplx f = s * e[i];
        const cplx b = c * e[i];
        r = std::sqrt(f * f + g * g);
        e[i + 1] = r;
        if (std::norm(r) < 1e-24 * (std::norm(f) + std::norm(g))) {
          breakdown = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (breakdown) {
        shift_kick = 1e-6 * iter;
        continue;
      }
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
}

// Characteristic determinant of (T - lambda I) and its lambda-derivative via
// the three-term recurrence, jointly rescaled to avoid overflow; used for
// Newton polishing of QL eigenvalues. offp[k] = sub_k * sup_k.
cplx newton_step(const TridiagonalOperator& t, const std::vector<double>& offp,
                 cplx lambda) {
  cplx dm2(0.0), dm1(1.0);
  cplx pm2(0.0), pm1(0.0);
  for (std::size_t k = 0; k < t.size; ++k) {
    const cplx a = t.diag[k] - lambda;
    cplx dk = a * dm1;
    cplx pk = -dm1 + a * pm1;
    if (k >= 1) {
      dk -= offp[k - 1] * dm2;
      pk -= offp[k - 1] * pm2;
    }
    const double mag = std::max(std::max(std::abs(dk), std::abs(pk)),
                                std::max(std::abs(dm1), std::abs(pm1)));
    if (mag > 1e100) {
      constexpr double sc = 1e-100;
      dk *= sc;
      pk *= sc;
      dm1 *= sc;
      pm1 *= sc;
    }
    dm2 = dm1;
    dm1 = dk;
    pm2 = pm1;
    pm1 = pk;
  }
  if (pm1 == cplx(0.0)) return cplx(0.0);
  return dm1 / pm1;
}

cplx polish_eigenvalue(const TridiagonalOperator& t, const std::vector<double>& offp,
                       cplx lambda) {
  for (int it = 0; it < 4; ++it) {
    const cplx step = newton_step(t, offp, lambda);
    if (std::abs(step) > 0.25 * (1.0 + std::abs(lambda))) break;  // shot past a neighbour
    lambda -= step;
    if (std::abs(step) <= 4.0 * kEps * (1.0 + std::abs(lambda))) break;
  }
  return lambda;
}

// Solves (T - lambda I) x = b with partial pivoting; tridiagonal plus one
// fill-in superdiagonal. Zero pivots are replaced by eps * |T| so that exact
// shifts behave like the usual inverse-iteration trick.
struct ShiftedSolver {
  std::size_t n;
  std::vector<cplx> l, u0, u1, u2;
  std::vector<int> piv;

  ShiftedSolver(const TridiagonalOperator& t, cplx lambda) : n(t.size) {
    u0.assign(n, cplx(0.0));
    u1.assign(n, cplx(0.0));
    u2.assign(n, cplx(0.0));
    l.assign(n, cplx(0.0));
    piv.assign(n, 0);
    std::vector<cplx> a(n), b(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = t.diag[i] - lambda;
      b[i] = (i + 1 < n) ? cplx(t.sup[i]) : cplx(0.0);
      c[i] = (i + 1 < n) ? cplx(t.sub[i]) : cplx(0.0);  // row i+1, column i
    }
    const double floor_piv = kEps * std::max(1.0, t.row_norm());
    for (std::size_t k = 0; k < n; ++k) {
      if (k + 1 == n) {
        u0[k] = (std::abs(a[k]) < floor_piv) ? cplx(floor_piv) : a[k];
        break;
      }
      // rows k: (a[k], b[k], 0) and k+1: (c[k], a[k+1], b[k+1])
      if (std::abs(c[k]) > std::abs(a[k])) {
        piv[k] = 1;
        u0[k] = c[k];
        u1[k] = a[k + 1];
        u2[k] = b[k + 1];
        const cplx m = a[k] / u0[k];
        l[k] = m;
        a[k + 1] = b[k] - m * u1[k];
        b[k + 1] = -m * u2[k];
      } else {
        u0[k] = (std::abs(a[k]) < floor_piv) ? cplx(floor_piv) : a[k];
        u1[k] = b[k];
        u2[k] = cplx(0.0);
        const cplx m = c[k] / u0[k];
        l[k] = m;
        a[k + 1] -= m * b[k];
      }
    }
  }

  void solve(std::vector<cplx>& x) const {
    // forward substitution with recorded pivoting
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (piv[k]) std::swap(x[k], x[k + 1]);
      x[k + 1] -= l[k] * x[k];
    }
    // back substitution (bandwidth 2)
    for (std::size_t i = n; i-- > 0;) {
      cplx s = x[i];
      if (i + 1 < n) s -= u1[i] * x[i + 1];
      if (i + 2 < n) s -= u2[i] * x[i + 2];
      x[i] = s / u0[i];
    }
  }
};

double vec_norm(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const cplx& z : v) s += std::norm(z);
  return std::sqrt(s);
}

void normalize(std::vector<cplx>& v) {
  const double nrm = vec_norm(v);
  if (nrm > 0.0) {
    for (cplx& z : v) z /= nrm;
  }
}

double residual_norm(const TridiagonalOperator& t, cplx lambda,
                     const std::vector<cplx>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.size; ++i) {
    cplx r = (t.diag[i] - lambda) * v[i];
    if (i > 0) r += t.sub[i - 1] * v[i - 1];
    if (i + 1 < t.size) r += t.sup[i] * v[i + 1];
    s += std::norm(r);
  }
  return std::sqrt(s);
}

}  // namespace

BalancedOperator balance(const TridiagonalOperator& t) {
  BalancedOperator out;
  out.original = t;
  out.balanced = t;
  out.scale.assign(t.size, 1.0);
  for (std::size_t k = 0; k + 1 < t.size; ++k) {
    const double prod = t.sub[k] * t.sup[k];
    if (prod == 0.0) {
      out.scale[k + 1] = out.scale[k];
      continue;
    }
    const double g = std::sqrt(std::abs(prod));
    // D^-1 T D with d_{k+1}/d_k = g / sub_k maps the pair to magnitude g on
    // both sides, preserving the sign pattern.
    out.scale[k + 1] = out.scale[k] * g / t.sub[k];
    const double sign_sub = t.sub[k] >= 0.0 ? 1.0 : -1.0;
    const double sign_sup = t.sup[k] >= 0.0 ? 1.0 : -1.0;
    out.balanced.sub[k] = sign_sub * g;
    out.balanced.sup[k] = sign_sup * g;
  }
  return out;
}

SpectrumResult eigen_all(const BalancedOperator& b, bool want_vectors) {
  const TridiagonalOperator& t = b.balanced;
  const std::size_t n = t.size;
  SpectrumResult out;
  out.epsilon = t.epsilon;
  out.n = n;
  if (n == 0) return out;

  // Complex symmetric similar form: diagonal unchanged, off-diagonal
  // e_k with e_k^2 = sub_k * sup_k.
  std::vector<cplx> d(t.diag.begin(), t.diag.end());
  std::vector<cplx> e(n, cplx(0.0));
  std::vector<double> offp(n > 0 ? n - 1 : 0, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    offp[k] = t.sub[k] * t.sup[k];
    e[k] = std::sqrt(cplx(offp[k]));
  }
  csym_tridiag_ql(d, e);

  out.pairs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.pairs[i].lambda = polish_eigenvalue(t, offp, d[i]);
  }
  std::sort(out.pairs.begin(), out.pairs.end(), [](const EigenPair& x, const EigenPair& y) {
    if (x.lambda.real() != y.lambda.real()) return x.lambda.real() < y.lambda.real();
    return x.lambda.imag() < y.lambda.imag();
  });

  if (want_vectors) {
    // Inverse iteration on the original (unbalanced) matrix. Vectors of
    // nearby eigenvalues are reorthogonalized to keep clusters separated.
    const double near = 1e-3;
    for (std::size_t i = 0; i < n; ++i) {
      EigenPair& pair = out.pairs[i];
      auto [v, res] = eigenvector_for(b.original, pair.lambda);
      for (std::size_t j = i; j-- > 0;) {
        if (std::abs(out.pairs[j].lambda - pair.lambda) >
            near * (1.0 + std::abs(pair.lambda)))
          break;
        const std::vector<cplx>& w = out.pairs[j].vector;
        if (w.empty()) continue;
        cplx dot(0.0);
        for (std::size_t k = 0; k < n; ++k) dot += std::conj(w[k]) * v[k];
        for (std::size_t k = 0; k < n; ++k) v[k] -= dot * w[k];
        normalize(v);
      }
      pair.vector = std::move(v);
      pair.residual = residual_norm(b.original, pair.lambda, pair.vector);
    }
  }
  return out;
}

SpectrumResult compute_spectrum(const TridiagonalOperator& t, bool want_vectors) {
  return eigen_all(balance(t), want_vectors);
}

void mark_stable(SpectrumResult& small, const SpectrumResult& large, double tol) {
  if (large.n < 2 * small.n) {
    throw std::invalid_argument("filter_stable requires the large truncation to be "
                                "at least twice the small one");
  }
  if (large.epsilon != small.epsilon) {
    throw std::invalid_argument("filter_stable requires equal epsilon");
  }
  for (EigenPair& p : small.pairs) {
    double best = std::numeric_limits<double>::infinity();
    for (const EigenPair& q : large.pairs) {
      best = std::min(best, std::abs(q.lambda - p.lambda));
    }
    p.stable = best <= tol * (1.0 + std::abs(p.lambda));
  }
}

std::vector<EigenPair> filter_stable(const SpectrumResult& small,
                                     const SpectrumResult& large, double tol) {
  SpectrumResult tmp = small;
  mark_stable(tmp, large, tol);
  std::vector<EigenPair> kept;
  for (EigenPair& p : tmp.pairs) {
    if (p.stable) kept.push_back(std::move(p));
  }
  return kept;
}

std::pair<std::vector<cplx>, double> eigenvector_for(const TridiagonalOperator& t,
                                                     cplx lambda) {
  const std::size_t n = t.size;
  ShiftedSolver solver(t, lambda);
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = cplx(1.0 / std::sqrt(static_cast<double>(i + 1)), 0.0);
  }
  normalize(v);
  double res = 0.0;
  for (int pass = 0; pass < 3; ++pass) {
    solver.solve(v);
    normalize(v);
    res = residual_norm(t, lambda, v);
    if (res <= 64.0 * kEps * std::max(1.0, t.row_norm())) break;
  }
  return {std::move(v), res};
}

}  // namespace bos
