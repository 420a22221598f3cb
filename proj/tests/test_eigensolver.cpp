#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "bos/eigensolver.hpp"
#include "bos/operator_core.hpp"

using bos::cplx;

namespace {

Eigen::MatrixXd dense_of(const bos::TridiagonalOperator& t) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<long>(t.size),
                                            static_cast<long>(t.size));
  for (std::size_t i = 0; i < t.size; ++i) {
    m(static_cast<long>(i), static_cast<long>(i)) = t.diag[i];
    if (i + 1 < t.size) {
      m(static_cast<long>(i), static_cast<long>(i + 1)) = t.sup[i];
      m(static_cast<long>(i + 1), static_cast<long>(i)) = t.sub[i];
    }
  }
  return m;
}

// brute-force oracle spectrum, sorted by (Re, Im)
std::vector<cplx> oracle_spectrum(const bos::TridiagonalOperator& t) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(dense_of(t));
  std::vector<cplx> v;
  for (long i = 0; i < es.eigenvalues().size(); ++i) {
    v.push_back(es.eigenvalues()(i));
  }
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return v;
}

double match_error(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double worst = 0.0;
  std::vector<bool> used(b.size(), false);
  for (const cplx& x : a) {
    double best = 1e300;
    std::size_t bi = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(b[j] - x);
      if (d < best) {
        best = d;
        bi = j;
      }
    }
    used[bi] = true;
    worst = std::max(worst, best / (1.0 + std::abs(x)));
  }
  return worst;
}

}  // namespace

TEST_CASE("2x2 section has the closed-form eigenvalues") {
  // roots of lambda^2 - 3 lambda + 2 + eps^2
  const bos::SpectrumResult s =
      bos::compute_spectrum(bos::build_truncated(0.3, 2), false);
  REQUIRE(s.pairs.size() == 2);
  CHECK(s.pairs[0].lambda.real() == doctest::Approx(1.1).epsilon(1e-13));
  CHECK(s.pairs[1].lambda.real() == doctest::Approx(1.9).epsilon(1e-13));
  CHECK(std::abs(s.pairs[0].lambda.imag()) < 1e-13);
  CHECK(std::abs(s.pairs[1].lambda.imag()) < 1e-13);
}

TEST_CASE("1x1 section") {
  const bos::SpectrumResult s =
      bos::compute_spectrum(bos::build_truncated(1.3, 1), true);
  REQUIRE(s.pairs.size() == 1);
  CHECK(s.pairs[0].lambda == cplx(1.0));
  CHECK(std::abs(s.pairs[0].vector[0]) == doctest::Approx(1.0));
}

TEST_CASE("2x2 complex pair at eps=0.7") {
  // truncation can create complex pairs: (3 +- i sqrt(4 eps^2 - 1))/2
  const bos::SpectrumResult s =
      bos::compute_spectrum(bos::build_truncated(0.7, 2), false);
  REQUIRE(s.pairs.size() == 2);
  const double im = std::sqrt(4.0 * 0.49 - 1.0) / 2.0;
  CHECK(s.pairs[0].lambda.real() == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(s.pairs[0].lambda.imag() == doctest::Approx(-im).epsilon(1e-12));
  CHECK(s.pairs[1].lambda.imag() == doctest::Approx(im).epsilon(1e-12));
}

TEST_CASE("balance leaves the exactly built section unchanged") {
  const bos::TridiagonalOperator t = bos::build_truncated(0.3, 2);
  const bos::BalancedOperator b = bos::balance(t);
  CHECK(b.balanced.sub[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(b.balanced.sup[0] == doctest::Approx(-0.3).epsilon(1e-15));

  const bos::BalancedOperator b3 = bos::balance(bos::build_truncated(0.5, 3));
  CHECK(std::abs(b3.balanced.sub[1]) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(std::abs(b3.balanced.sup[1]) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("balance maps unequal off-diagonal pairs to the geometric mean") {
  bos::TridiagonalOperator t = bos::build_truncated(0.5, 4);
  // diagonally rescale by hand to unbalance the pairs
  const double d[] = {1.0, 3.0, 0.25, 2.0};
  for (std::size_t k = 0; k + 1 < t.size; ++k) {
    t.sub[k] *= d[k] / d[k + 1];
    t.sup[k] *= d[k + 1] / d[k];
  }
  const bos::BalancedOperator b = bos::balance(t);
  for (std::size_t k = 0; k + 1 < t.size; ++k) {
    const double g = 0.25 * static_cast<double>((k + 1) * (k + 2));
    CHECK(std::abs(b.balanced.sub[k]) == doctest::Approx(g).epsilon(1e-13));
    CHECK(std::abs(b.balanced.sup[k]) == doctest::Approx(g).epsilon(1e-13));
    CHECK(b.balanced.sub[k] > 0.0);
    CHECK(b.balanced.sup[k] < 0.0);
  }
  // spectrum unchanged by the similarity
  CHECK(match_error(oracle_spectrum(t), oracle_spectrum(b.balanced)) < 1e-12);
}

TEST_CASE("spectra agree with the dense oracle across sizes and epsilon") {
  for (double eps : {0.3, 0.5, 0.7, 1.3}) {
    for (std::size_t n : {3u, 8u, 17u, 64u}) {
      const bos::TridiagonalOperator t = bos::build_truncated(eps, n);
      const bos::SpectrumResult s = bos::compute_spectrum(t, false);
      REQUIRE(s.pairs.size() == n);
      std::vector<cplx> mine;
      for (const bos::EigenPair& p : s.pairs) mine.push_back(p.lambda);
      CHECK(match_error(mine, oracle_spectrum(t)) < 1e-11);
    }
  }
}

TEST_CASE("residual contract for eigenvectors") {
  for (double eps : {0.5, 1.3}) {
    const bos::TridiagonalOperator t = bos::build_truncated(eps, 200);
    const bos::SpectrumResult s = bos::compute_spectrum(t, true);
    const double scale = t.row_norm();
    for (const bos::EigenPair& p : s.pairs) {
      double nrm = 0.0;
      for (const cplx& z : p.vector) nrm += std::norm(z);
      CHECK(std::sqrt(nrm) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(p.residual <= 1e-8 * scale);
    }
  }
}

TEST_CASE("sorted output is deterministic") {
  const bos::TridiagonalOperator t = bos::build_truncated(0.7, 50);
  const bos::SpectrumResult a = bos::compute_spectrum(t, false);
  const bos::SpectrumResult b = bos::compute_spectrum(t, false);
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    CHECK(a.pairs[i].lambda.real() == b.pairs[i].lambda.real());
    CHECK(a.pairs[i].lambda.imag() == b.pairs[i].lambda.imag());
    if (i > 0) {
      const bool ordered =
          a.pairs[i - 1].lambda.real() < a.pairs[i].lambda.real() ||
          (a.pairs[i - 1].lambda.real() == a.pairs[i].lambda.real() &&
           a.pairs[i - 1].lambda.imag() <= a.pairs[i].lambda.imag());
      CHECK(ordered);
    }
  }
}

TEST_CASE("filter_stable basics") {
  const bos::SpectrumResult s1 =
      bos::compute_spectrum(bos::build_truncated(0.5, 20), false);
  bos::SpectrumResult s2 = s1;
  s2.n = 40;  // identical spectra, formally larger truncation
  const std::vector<bos::EigenPair> all = bos::filter_stable(s1, s2, 1e-12);
  CHECK(all.size() == s1.pairs.size());
  for (const bos::EigenPair& p : all) CHECK(p.stable);

  // disjoint spectra: shift everything far away
  bos::SpectrumResult s3 = s2;
  for (bos::EigenPair& p : s3.pairs) p.lambda += cplx(1000.0);
  CHECK(bos::filter_stable(s1, s3, 1e-12).empty());

  CHECK_THROWS_AS(bos::filter_stable(s1, s1, 1e-8), std::invalid_argument);
}

TEST_CASE("stable eigenvalues at N vs 2N are real") {
  const bos::SpectrumResult s1 =
      bos::compute_spectrum(bos::build_truncated(0.5, 500), false);
  const bos::SpectrumResult s2 =
      bos::compute_spectrum(bos::build_truncated(0.5, 1000), false);
  const std::vector<bos::EigenPair> stable = bos::filter_stable(s1, s2, 1e-8);
  CHECK(!stable.empty());
  for (const bos::EigenPair& p : stable) {
    CHECK(std::abs(p.lambda.imag()) <= 1e-8 * (1.0 + std::abs(p.lambda)));
  }
}

TEST_CASE("monotone stabilization of the smallest eigenvalue") {
  // once resolved, the k-th smallest stable eigenvalue moves less and less
  // under doubling
  double prev_drift = 1e300;
  double lam_prev = 0.0;
  for (std::size_t n : {400u, 800u, 1600u}) {
    const bos::SpectrumResult s =
        bos::compute_spectrum(bos::build_truncated(0.5, n), false);
    double lam = 1e300;
    for (const bos::EigenPair& p : s.pairs) {
      if (std::abs(p.lambda.imag()) < 1e-8) {
        lam = std::min(lam, p.lambda.real());
      }
    }
    if (n > 400u) {
      const double drift = std::abs(lam - lam_prev);
      CHECK(drift < prev_drift + 1e-12);
      prev_drift = drift;
    }
    lam_prev = lam;
  }
  CHECK(prev_drift < 1e-9);
}

TEST_CASE("eigenvector_for matches eigen_all residuals") {
  const bos::TridiagonalOperator t = bos::build_truncated(0.7, 120);
  const bos::SpectrumResult s = bos::compute_spectrum(t, false);
  const auto [v, res] = bos::eigenvector_for(t, s.pairs[0].lambda);
  CHECK(v.size() == t.size);
  CHECK(res <= 1e-9 * t.row_norm());
}
