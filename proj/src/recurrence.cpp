#include "bos/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bos {

namespace {

constexpr double kHuge = 1e280;
constexpr double kRescaleAt = 1e270;

// Asymptotic form of the minimal solution,
//   v_n ~ (-1)^n n^(-(1+1/eps)) (1 + a1/n + a2/n^2 + a3/n^3 + a4/n^4),
// obtained by substituting the ansatz into the recurrence and matching
// orders of 1/n. Used to seed the backward run; a generic (0,1) seed decays
// onto the minimal solution only like (n/M)^(2/eps).
struct AsymptoticTail {
  double c;
  cplx a1, a2, a3, a4;

  AsymptoticTail(double eps, cplx lam) {
    c = 1.0 + 1.0 / eps;
    const double e1 = eps, e2 = eps * eps, e3 = e2 * eps, e4 = e3 * eps,
                 e5 = e4 * eps, e6 = e5 * eps;
    const cplx l2 = lam * lam, l4 = l2 * l2;
    a1 = -lam / e1;
    a2 = -(2.0 * e2 - 6.0 * e1 * l2 + 3.0 * e1 + 1.0) / (12.0 * e3);
    a3 = lam * (4.0 * e3 + 8.0 * e2 - 2.0 * e1 * l2 + 5.0 * e1 + 1.0) / (12.0 * e4);
    a4 = (168.0 * e5 - 840.0 * e4 * l2 + 470.0 * e4 - 1020.0 * e3 * l2 + 495.0 * e3 +
          60.0 * e2 * l4 - 420.0 * e2 * l2 + 245.0 * e2 - 60.0 * e1 * l2 + 57.0 * e1 +
          5.0) /
         (1440.0 * e6);
  }

  // v_n up to a common constant; scaled by start^c so the seed is O(1).
  cplx eval(std::size_t n, double log_scale) const {
    const double x = static_cast<double>(n);
    const cplx f = 1.0 + a1 / x + a2 / (x * x) + a3 / (x * x * x) + a4 / (x * x * x * x);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign * std::exp(-c * std::log(x) + log_scale) * f;
  }
};

struct BackwardRun {
  std::vector<cplx> values;  // v_1..v_keep, unnormalized
  cplx v1, v2;               // values at the stop index and stop index + 1
};

// One backward pass from `start` down to `stop`, storing v_1..v_keep when
// the pass reaches index 1.
BackwardRun backward_pass(double eps, cplx lam, std::size_t start, std::size_t keep,
                          bool asymptotic_seed, std::size_t stop = 1) {
  BackwardRun run;
  run.values.assign(keep, cplx(0.0));
  cplx vp2, vp1;  // v_{n+2}, v_{n+1} while processing index n
  if (asymptotic_seed) {
    const AsymptoticTail tail(eps, lam);
    const double log_scale = tail.c * std::log(static_cast<double>(start));
    vp2 = tail.eval(start + 1, log_scale);
    vp1 = tail.eval(start, log_scale);
  } else {
    vp2 = cplx(0.0);
    vp1 = cplx(1.0);
  }
  if (start <= keep) run.values[start - 1] = vp1;
  for (std::size_t n = start - 1; n >= stop; --n) {
    const double dn = static_cast<double>(n);
    const cplx vn = (0.5 * eps * (dn + 1.0) * (dn + 2.0) * vp2 + (lam - dn - 1.0) * vp1) /
                    (0.5 * eps * dn * (dn + 1.0));
    vp2 = vp1;
    vp1 = vn;
    if (std::abs(vp1) > kRescaleAt || std::abs(vp2) > kRescaleAt) {
      constexpr double sc = 1e-200;
      vp1 *= sc;
      vp2 *= sc;
      for (cplx& z : run.values) z *= sc;
    }
    if (n <= keep) run.values[n - 1] = vp1;
  }
  run.v1 = vp1;
  run.v2 = vp2;
  return run;
}

// Forward pass from the initial condition v_1 = 1, v_2 = (1-lambda)/eps up
// to (v_m, v_{m+1}), rescaled on the fly; only the direction matters.
std::pair<cplx, cplx> forward_pair(double eps, cplx lam, std::size_t m) {
  cplx a(1.0);                 // v_1
  cplx b((1.0 - lam) / eps);   // v_2
  for (std::size_t n = 1; n + 1 <= m; ++n) {
    const double dn = static_cast<double>(n);
    const cplx next = (0.5 * eps * dn * (dn + 1.0) * a - (lam - dn - 1.0) * b) /
                      (0.5 * eps * (dn + 1.0) * (dn + 2.0));
    a = b;
    b = next;
    if (std::abs(a) > kRescaleAt || std::abs(b) > kRescaleAt) {
      constexpr double sc = 1e-200;
      a *= sc;
      b *= sc;
    }
  }
  return {a, b};  // (v_m, v_{m+1})
}

// Matching index for two-sided shooting: near the diagonal entry closest to
// Re(lambda), where both one-sided runs are still well conditioned. The
// plain n=1 residual loses the minimal solution to roundoff once lambda is
// large, because the minimal solution decays steeply below its turning
// point; matching the two runs there instead keeps full accuracy.
std::size_t match_index(cplx lam, std::size_t start) {
  const double r = std::abs(lam.real());
  std::size_t m = static_cast<std::size_t>(std::llround(std::max(2.0, r)));
  return std::min(m, start / 4 + 2);
}

// Casoratian mismatch of the forward and backward runs at the match index.
// The Casoratian alternates sign from one index to the next, so the result
// is normalized by (-1)^m to make the sign convention index-independent.
// analytic=false: modulus scale, sign-stable for bracketing on the real
// line. analytic=true: complex-sqrt scale for Newton steps.
cplx matched_residual(double eps, cplx lam, std::size_t start, std::size_t m,
                      bool analytic) {
  const auto [f0, f1] = forward_pair(eps, lam, m);
  const BackwardRun back = backward_pass(eps, lam, start, 0, true, m);
  const cplx b0 = back.v1, b1 = back.v2;  // v_m, v_{m+1}
  const cplx cross = (m % 2 == 0 ? 1.0 : -1.0) * (f0 * b1 - f1 * b0);
  if (analytic) {
    cplx s = std::sqrt((f0 * f0 + f1 * f1) * (b0 * b0 + b1 * b1));
    if (std::norm(s) < 1e-4 * (std::norm(f0) + std::norm(f1)) *
                           (std::norm(b0) + std::norm(b1))) {
      s = cplx(std::max(std::abs(f0), std::abs(f1)) *
               std::max(std::abs(b0), std::abs(b1)));
    }
    if (s == cplx(0.0)) return cplx(0.0);
    return cross / s;
  }
  const double scale = std::max(std::abs(f0), std::abs(f1)) *
                       std::max(std::abs(b0), std::abs(b1));
  if (scale == 0.0) return cplx(0.0);
  return cross / scale;
}

double rel_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double worst = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = std::max(std::abs(a[i]), std::abs(b[i]));
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

void normalize_to_v1(std::vector<cplx>& values, cplx v1) {
  for (cplx& z : values) z /= v1;
}

constexpr std::size_t kDefaultStart = 3072;

}  // namespace

CoefficientSequence forward_run(double epsilon, cplx lambda, std::size_t m) {
  if (m < 2) throw std::invalid_argument("forward_run requires M >= 2");
  CoefficientSequence seq;
  seq.epsilon = epsilon;
  seq.lambda = lambda;
  seq.values.reserve(m);
  seq.values.push_back(cplx(1.0));
  seq.values.push_back((1.0 - lambda) / epsilon);
  for (std::size_t n = 1; n + 2 <= m; ++n) {
    const double dn = static_cast<double>(n);
    const cplx next = (0.5 * epsilon * dn * (dn + 1.0) * seq.values[n - 1] -
                       (lambda - dn - 1.0) * seq.values[n]) /
                      (0.5 * epsilon * (dn + 1.0) * (dn + 2.0));
    if (!(std::abs(next) < kHuge)) {
      seq.truncated = true;
      break;
    }
    seq.values.push_back(next);
  }
  return seq;
}

CoefficientSequence backward_minimal(double epsilon, cplx lambda, std::size_t start,
                                     std::size_t nout, const BackwardOptions& opt) {
  if (nout == 0) throw std::invalid_argument("backward_minimal requires N_out >= 1");
  if (start < nout + 50) {
    throw std::invalid_argument("backward_minimal requires start >= N_out + 50");
  }
  CoefficientSequence seq;
  seq.epsilon = epsilon;
  seq.lambda = lambda;

  BackwardRun cur = backward_pass(epsilon, lambda, start, nout, opt.asymptotic_seed);
  bool converged = false;
  while (true) {
    const std::size_t next_start = start * 2;
    if (next_start > opt.max_start) break;
    BackwardRun next = backward_pass(epsilon, lambda, next_start, nout, opt.asymptotic_seed);
    // compare in a common normalization
    std::vector<cplx> a = cur.values, b = next.values;
    const double sa = std::abs(cur.v1) > 0 ? std::abs(cur.v1) : 1.0;
    const double sb = std::abs(next.v1) > 0 ? std::abs(next.v1) : 1.0;
    for (cplx& z : a) z /= sa;
    for (cplx& z : b) z /= sb;
    // account for a possible phase between runs via the largest entry
    std::size_t imax = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::abs(a[i]) > std::abs(a[imax])) imax = i;
    }
    if (std::abs(b[imax]) > 0.0) {
      const cplx phase = a[imax] / b[imax];
      for (cplx& z : b) z *= phase;
    }
    const double diff = rel_diff(a, b);
    cur = std::move(next);
    start = next_start;
    if (diff <= opt.self_consistency) {
      converged = true;
      break;
    }
  }
  seq.accurate = converged;

  double maxmag = 0.0;
  for (const cplx& z : cur.values) maxmag = std::max(maxmag, std::abs(z));
  if (std::abs(cur.v1) <= 1e-290 || std::abs(cur.v1) < 1e-14 * maxmag) {
    seq.v1_negligible = true;
    seq.values = std::move(cur.values);  // reported unnormalized
  } else {
    normalize_to_v1(cur.values, cur.v1);
    seq.values = std::move(cur.values);
  }
  return seq;
}

cplx shooting_residual(double epsilon, cplx lambda, std::size_t start) {
  if (start == 0) start = kDefaultStart;
  const BackwardRun run = backward_pass(epsilon, lambda, start, 2, true);
  const double scale = std::max(std::abs(run.v1), std::abs(run.v2));
  if (scale == 0.0) return cplx(0.0);
  return (epsilon * run.v2 - (1.0 - lambda) * run.v1) / scale;
}

cplx shooting_residual_analytic(double epsilon, cplx lambda, std::size_t start) {
  if (start == 0) start = kDefaultStart;
  const BackwardRun run = backward_pass(epsilon, lambda, start, 2, true);
  if (std::abs(run.v1) == 0.0) {
    return cplx(std::numeric_limits<double>::infinity(), 0.0);
  }
  return epsilon * (run.v2 / run.v1) - (1.0 - lambda);
}

std::size_t shooting_start_index(double epsilon, double lo, double hi) {
  std::size_t start = kDefaultStart;
  const double probes[3] = {lo, 0.5 * (lo + hi), hi};
  for (int round = 0; round < 12; ++round) {
    double worst = 0.0;
    for (double x : probes) {
      const std::size_t m = match_index(cplx(x), start);
      const cplx f1 = matched_residual(epsilon, cplx(x), start, m, false);
      const cplx f2 = matched_residual(epsilon, cplx(x), 2 * start, m, false);
      worst = std::max(worst, std::abs(f1 - f2) / (1.0 + std::abs(f2)));
    }
    if (worst <= 1e-12) return start;
    start *= 2;
  }
  return start;
}

std::vector<double> find_real_roots(double epsilon, double lo, double hi,
                                    std::size_t seeds) {
  if (!(lo < hi)) throw std::invalid_argument("find_real_roots requires lo < hi");
  if (seeds < 2) seeds = 2;
  const std::size_t start = shooting_start_index(epsilon, lo, hi);
  auto f = [&](double x) {
    const std::size_t m = match_index(cplx(x), start);
    return matched_residual(epsilon, cplx(x), start, m, false).real();
  };

  std::vector<double> xs(seeds), fs(seeds);
  for (std::size_t i = 0; i < seeds; ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(seeds - 1);
    fs[i] = f(xs[i]);
  }
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < seeds; ++i) {
    if (fs[i] == 0.0) {
      roots.push_back(xs[i]);
      continue;
    }
    if ((fs[i] > 0) == (fs[i + 1] > 0)) continue;
    double a = xs[i], b = xs[i + 1], fa = fs[i];
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (a + b);
      const double fm = f(mid);
      if ((fm > 0) == (fa > 0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
      if (b - a <= 1e-14 * (1.0 + std::abs(a))) break;
    }
    roots.push_back(0.5 * (a + b));
  }
  if (fs.back() == 0.0) roots.push_back(xs.back());
  std::sort(roots.begin(), roots.end());
  std::vector<double> dedup;
  for (double r : roots) {
    if (dedup.empty() || r - dedup.back() > 1e-10 * (1.0 + std::abs(r))) {
      dedup.push_back(r);
    }
  }
  return dedup;
}

ScanResult complex_scan(double epsilon, double re_lo, double re_hi, double im_lo,
                        double im_hi, std::size_t nre, std::size_t nim) {
  if (!(re_lo < re_hi) || !(im_lo < im_hi)) {
    throw std::invalid_argument("complex_scan requires a nonempty rectangle");
  }
  const std::size_t start = shooting_start_index(epsilon, re_lo, re_hi);

  const double margin_re = re_hi - re_lo, margin_im = im_hi - im_lo;
  ScanResult out;
  std::vector<cplx> converged;
  for (std::size_t i = 0; i < nre; ++i) {
    for (std::size_t j = 0; j < nim; ++j) {
      cplx z(re_lo + margin_re * (static_cast<double>(i) + 0.5) / static_cast<double>(nre),
             im_lo + margin_im * (static_cast<double>(j) + 0.5) / static_cast<double>(nim));
      // the match index stays fixed along one Newton path so that the
      // iterates see a single smooth function
      const std::size_t m = match_index(z, start);
      auto f = [&](cplx w) { return matched_residual(epsilon, w, start, m, true); };
      bool ok = false;
      for (int it = 0; it < 50; ++it) {
        const cplx fz = f(z);
        if (std::abs(fz) <= 1e-11) {
          ok = true;
          break;
        }
        const double h = 1e-6 * (1.0 + std::abs(z));
        const cplx df = (f(z + h) - f(z - h)) / (2.0 * h);
        if (df == cplx(0.0)) break;
        cplx step = fz / df;
        // damping keeps iterates local; bare steps near the poles of F
        // catapult every seed into the basin of the smallest root
        const double cap = 0.35 * (1.0 + std::abs(z));
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        z -= step;
        if (z.real() < re_lo - margin_re || z.real() > re_hi + margin_re ||
            z.imag() < im_lo - 2.0 * margin_im || z.imag() > im_hi + 2.0 * margin_im) {
          break;
        }
        if (std::abs(step) <= 1e-14 * (1.0 + std::abs(z))) {
          ok = std::abs(f(z)) <= 1e-11;
          break;
        }
      }
      // only roots inside the requested rectangle are reported; iterates that
      // converge elsewhere count as dropped like any other stray seed
      if (ok && z.real() >= re_lo - 1e-9 && z.real() <= re_hi + 1e-9 &&
          z.imag() >= im_lo - 1e-9 && z.imag() <= im_hi + 1e-9) {
        converged.push_back(z);
      } else {
        ++out.dropped;
      }
    }
  }
  std::sort(converged.begin(), converged.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (const cplx& z : converged) {
    bool dup = false;
    for (const cplx& r : out.roots) {
      if (std::abs(z - r) <= 1e-8 * (1.0 + std::abs(r))) {
        dup = true;
        break;
      }
    }
    if (!dup) out.roots.push_back(z);
  }
  return out;
}

GenEval generating_eval(const CoefficientSequence& v, cplx z) {
  if (std::abs(z) > 1.0 + 1e-12) {
    throw std::invalid_argument("generating_eval requires |z| <= 1");
  }
  GenEval out;
  // Kahan-compensated accumulation of v_k z^k.
  cplx sum(0.0), comp(0.0), zp(1.0);
  for (std::size_t k = 0; k < v.values.size(); ++k) {
    zp *= z;
    const cplx term = v.values[k] * zp - comp;
    const cplx t = sum + term;
    comp = (t - sum) - term;
    sum = t;
  }
  out.value = sum;

  const std::size_t m = v.values.size();
  if (m >= 4) {
    const std::size_t half = m / 2;
    const double vm = std::abs(v.values[m - 1]);
    const double vh = std::abs(v.values[half - 1]);
    const double az = std::abs(z);
    if (vm == 0.0) {
      out.tail_bound = 0.0;
    } else if (az < 1.0) {
      out.tail_bound = vm * std::pow(az, static_cast<double>(m) + 1.0) / (1.0 - az);
    } else if (vh > 0.0 && vm < vh) {
      const double slope = (std::log(vm) - std::log(vh)) /
                           (std::log(static_cast<double>(m)) -
                            std::log(static_cast<double>(half)));
      out.tail_bound = (slope < -1.0)
                           ? vm * static_cast<double>(m) / (-slope - 1.0)
                           : std::numeric_limits<double>::infinity();
    } else {
      out.tail_bound = std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

double ode_residual(const CoefficientSequence& v) {
  const std::size_t len = v.values.size();
  if (len < 2) throw std::invalid_argument("ode_residual requires at least two values");
  const double eps = v.epsilon;
  const cplx lam = v.lambda;

  double maxmag = 0.0;
  for (const cplx& z : v.values) maxmag = std::max(maxmag, std::abs(z));
  const double floor = 1e-12 * maxmag;

  double worst = 0.0;
  {  // n = 1 initial condition
    const cplx r = eps * v.values[1] - (1.0 - lam) * v.values[0];
    const double scale = eps * std::abs(v.values[1]) +
                         std::abs(1.0 - lam) * std::abs(v.values[0]);
    if (scale > 0.0 &&
        std::max(std::abs(v.values[0]), std::abs(v.values[1])) >= floor) {
      worst = std::abs(r) / scale;
    }
  }
  for (std::size_t n = 2; n + 1 <= len; ++n) {
    const double dn = static_cast<double>(n);
    const cplx t1 = 0.5 * eps * dn * (dn + 1.0) * v.values[n];      // v_{n+1}
    const cplx t2 = (lam - dn) * v.values[n - 1];                   // v_n
    const cplx t3 = -0.5 * eps * dn * (dn - 1.0) * v.values[n - 2]; // v_{n-1}
    const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3);
    const double vmax = std::max({std::abs(v.values[n]), std::abs(v.values[n - 1]),
                                  std::abs(v.values[n - 2])});
    if (scale == 0.0 || vmax < floor) continue;
    worst = std::max(worst, std::abs(t1 + t2 + t3) / scale);
  }
  return worst;
}

}  // namespace bos
