#include "bos/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bos {

namespace {

constexpr double kUnderflowFloor = 1e-290;

// slope and intercept of y against x by least squares
std::pair<double, double> line_fit(const std::vector<double>& x,
                                   const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return {0.0, sy / n};
  const double slope = (n * sxy - sx * sy) / denom;
  return {slope, (sy - slope * sx) / n};
}

}  // namespace

double weighted_sup_norm(const std::vector<cplx>& v, double c) {
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    best = std::max(best, std::abs(v[i]) * std::pow(n, c));
  }
  return best;
}

std::optional<double> decay_slope(const std::vector<cplx>& v, std::size_t lo,
                                  std::size_t hi) {
  if (lo < 1) lo = 1;
  hi = std::min(hi, v.size());
  std::vector<double> xs, ys;
  for (std::size_t n = lo; n <= hi; ++n) {
    const double mag = std::abs(v[n - 1]);
    if (mag <= kUnderflowFloor) continue;
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(mag));
  }
  if (xs.size() < 5) return std::nullopt;
  return line_fit(xs, ys).first;
}

DecayBound davies_fit(const std::vector<EigenPair>& pairs, double epsilon) {
  if (pairs.size() < 1) throw std::invalid_argument("davies_fit needs eigenpairs");
  DecayBound out;
  out.c = 1.0 + 1.0 / epsilon;
  std::vector<double> lx, ly;
  for (const EigenPair& p : pairs) {
    const double norm = weighted_sup_norm(p.vector, out.c);
    out.weighted_norms.push_back(norm);
    if (std::abs(p.lambda) > 0.0 && norm > 0.0) {
      lx.push_back(std::log(std::abs(p.lambda)));
      ly.push_back(std::log(norm));
    }
  }
  if (lx.empty()) {
    out.degenerate_spread = true;
    out.b_fit = out.weighted_norms.empty() ? 0.0 : out.weighted_norms.front();
    out.m_fit = 0.0;
    return out;
  }
  const auto [lo_it, hi_it] = std::minmax_element(lx.begin(), lx.end());
  if (*hi_it - *lo_it < std::log(10.0)) out.degenerate_spread = true;

  double m = 0.0;
  if (lx.size() >= 2 && *hi_it > *lo_it) {
    m = line_fit(lx, ly).first;
  }
  // raise the intercept until the fit is an envelope
  double logb = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lx.size(); ++i) {
    logb = std::max(logb, ly[i] - m * lx[i]);
  }
  out.m_fit = m;
  out.b_fit = std::exp(logb);
  return out;
}

Ell1Tail ell1_tail(const std::vector<cplx>& v) {
  Ell1Tail out;
  double comp = 0.0;
  for (const cplx& z : v) {
    const double term = std::abs(z) - comp;
    const double t = out.sum + term;
    comp = (t - out.sum) - term;
    out.sum = t;
  }
  const std::size_t m = v.size();
  if (m < 8) {
    out.tail_estimate = 0.0;
    return out;
  }
  const double vm = std::abs(v[m - 1]);
  if (vm <= kUnderflowFloor) {
    out.tail_estimate = 0.0;  // finite support or underflow: no tail left
    return out;
  }
  const std::optional<double> slope = decay_slope(v, std::max<std::size_t>(1, m / 2), m);
  if (!slope || *slope >= -1.0) {
    out.summable = false;
    out.tail_estimate = std::numeric_limits<double>::infinity();
    return out;
  }
  // integral comparison: sum_{n>m} C n^s <= C m^{s+1} / (-s-1), C = vm / m^s
  out.tail_estimate = vm * static_cast<double>(m) / (-*slope - 1.0);
  return out;
}

CrossReport build_cross_report(double epsilon, const std::vector<EigenPair>& matrix_eigs,
                               const std::vector<double>& shooting_roots,
                               const std::vector<double>& sl_lambdas,
                               const std::vector<double>& connection_abs_b) {
  constexpr double kMatchTol = 1e-4;
  CrossReport rep;
  rep.epsilon = epsilon;

  std::vector<bool> used_shoot(shooting_roots.size(), false);
  std::vector<bool> used_sl(sl_lambdas.size(), false);

  std::vector<EigenPair> eigs = matrix_eigs;
  std::sort(eigs.begin(), eigs.end(), [](const EigenPair& a, const EigenPair& b) {
    return a.lambda.real() < b.lambda.real();
  });

  for (std::size_t i = 0; i < eigs.size(); ++i) {
    CrossRow row;
    row.lambda_matrix = eigs[i].lambda.real();
    row.decay_slope = eigs[i].decay_slope;
    const double scale = 1.0 + std::abs(row.lambda_matrix);

    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    for (std::size_t j = 0; j < shooting_roots.size(); ++j) {
      if (used_shoot[j]) continue;
      const double d = std::abs(shooting_roots[j] - row.lambda_matrix);
      if (d < best) {
        best = d;
        bi = j;
      }
    }
    if (best <= kMatchTol * scale) {
      row.lambda_shooting = shooting_roots[bi];
      used_shoot[bi] = true;
    }
    best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < sl_lambdas.size(); ++j) {
      if (used_sl[j]) continue;
      const double d = std::abs(sl_lambdas[j] - row.lambda_matrix);
      if (d < best) {
        best = d;
        bi = j;
      }
    }
    if (best <= kMatchTol * scale) {
      row.lambda_sl = sl_lambdas[bi];
      used_sl[bi] = true;
    }
    if (i < connection_abs_b.size()) row.connection_b = connection_abs_b[i];

    double disc = 0.0;
    if (row.lambda_shooting) {
      disc = std::max(disc, std::abs(*row.lambda_shooting - row.lambda_matrix));
    }
    if (row.lambda_sl) {
      disc = std::max(disc, std::abs(*row.lambda_sl - row.lambda_matrix));
    }
    if (row.lambda_shooting && row.lambda_sl) {
      disc = std::max(disc, std::abs(*row.lambda_shooting - *row.lambda_sl));
    }
    row.max_discrepancy = disc;
    rep.rows.push_back(row);
  }
  for (std::size_t j = 0; j < shooting_roots.size(); ++j) {
    if (!used_shoot[j]) rep.unmatched_shooting.push_back(shooting_roots[j]);
  }
  for (std::size_t j = 0; j < sl_lambdas.size(); ++j) {
    if (!used_sl[j]) rep.unmatched_sl.push_back(sl_lambdas[j]);
  }
  return rep;
}

}  // namespace bos
