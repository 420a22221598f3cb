#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

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

}  // namespace

TEST_CASE("entry_sub matches the row formula") {
  CHECK(bos::entry_sub(1.0, 1) == 0.0);  // n(n-1) vanishes at n=1
  CHECK(bos::entry_sub(0.5, 3) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(bos::entry_sub(2.0, 2) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(bos::entry_sub(0.5, 0), std::invalid_argument);
}

TEST_CASE("entry_sup matches the row formula") {
  CHECK(bos::entry_sup(1.0, 1) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(bos::entry_sup(0.5, 2) == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(bos::entry_sup(1e-300, 5) == doctest::Approx(0.0));  // vanishing coupling
  CHECK_THROWS_AS(bos::entry_sup(0.5, 0), std::invalid_argument);
}

TEST_CASE("build_truncated produces the leading section") {
  const bos::TridiagonalOperator t = bos::build_truncated(0.3, 2);
  CHECK(t.diag[0] == 1.0);
  CHECK(t.diag[1] == 2.0);
  CHECK(t.sup[0] == doctest::Approx(-0.3).epsilon(1e-15));
  CHECK(t.sub[0] == doctest::Approx(0.3).epsilon(1e-15));

  const bos::TridiagonalOperator one = bos::build_truncated(1.7, 1);
  CHECK(one.size == 1);
  CHECK(one.diag[0] == 1.0);
  CHECK(one.sub.empty());
  CHECK(one.sup.empty());

  const bos::TridiagonalOperator t3 = bos::build_truncated(0.5, 3);
  // row 2: sub = (eps/2)*2*1, diag = 2, sup = -(eps/2)*2*3
  CHECK(t3.sub[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t3.diag[1] == 2.0);
  CHECK(t3.sup[1] == doctest::Approx(-1.5).epsilon(1e-15));

  CHECK_THROWS_AS(bos::build_truncated(0.5, 0), std::invalid_argument);
  CHECK_THROWS_AS(bos::build_truncated(2.5, 4), std::invalid_argument);
  CHECK_THROWS_AS(bos::build_truncated(0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(bos::build_truncated(-0.5, 4), std::invalid_argument);
}

TEST_CASE("diagonal entries are exact integers for any size") {
  for (double eps : {0.3, 0.5, 1.3, 1.9}) {
    const bos::TridiagonalOperator t = bos::build_truncated(eps, 40);
    for (std::size_t i = 0; i < t.size; ++i) {
      CHECK(t.diag[i] == static_cast<double>(i + 1));
    }
  }
}

TEST_CASE("heun_parameters satisfy the Fuchsian relation exactly") {
  const bos::HeunParams h = bos::heun_parameters(0.5, cplx(1.0));
  CHECK(h.alpha == 1.0);
  CHECK(h.beta == 0.0);
  CHECK(h.gamma == 0.0);
  CHECK(h.a == -1.0);
  CHECK(h.delta == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(h.eps_h == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(h.mu.real() == doctest::Approx(4.0).epsilon(1e-15));

  const bos::HeunParams h2 = bos::heun_parameters(1.0, cplx(0.0));
  CHECK(h2.delta == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(h2.eps_h == doctest::Approx(0.0));
  CHECK(h2.mu == cplx(0.0));

  CHECK(bos::heun_parameters(0.4, cplx(2.0)).mu.real() ==
        doctest::Approx(10.0).epsilon(1e-15));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> de(1e-3, 2.0 - 1e-3);
  for (int i = 0; i < 200; ++i) {
    const bos::HeunParams hr = bos::heun_parameters(de(rng), cplx(de(rng), de(rng)));
    CHECK(std::abs(hr.fuchsian_defect()) <= 1e-14);
  }
}

TEST_CASE("sl_coefficients formulas and signs") {
  const bos::SLCoefficients c = bos::sl_coefficients(1.0);
  CHECK(c.p(0.5) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(c.w(0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(c.q(0.3) == 0.0);
  CHECK(c.p(0.0) == 1.0);
  CHECK_THROWS_AS(c.w(0.0), std::domain_error);

  // p, w -> 0 as z -> 1-
  for (double eps : {0.3, 0.7, 1.7}) {
    const bos::SLCoefficients cc = bos::sl_coefficients(eps);
    CHECK(cc.p(1.0 - 1e-12) < 1e-10);
    CHECK(cc.w(1.0 - 1e-12) < 1e-3);
    CHECK(cc.p(1.0) == 0.0);
  }
}

TEST_CASE("sl_coefficients positivity on random interior points") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dz(1e-12, 1.0 - 1e-12);
  for (double eps : {0.3, 0.5, 1.3, 1.9}) {
    const bos::SLCoefficients c = bos::sl_coefficients(eps);
    for (int i = 0; i < 1000; ++i) {
      const double z = dz(rng);
      CHECK(c.p(z) > 0.0);
      CHECK(c.w(z) > 0.0);
    }
  }
}

TEST_CASE("z w(z) extends continuously to 1 at z=0") {
  for (double eps : {0.3, 0.5, 1.3}) {
    const bos::SLCoefficients c = bos::sl_coefficients(eps);
    CHECK(c.zw(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.zw(1e-9) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(1e-9 * c.w(1e-9) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("reflect_minus reproduces the formula at negative indices") {
  const bos::TridiagonalOperator t1 = bos::reflect_minus(bos::build_truncated(0.3, 1));
  CHECK(t1.diag[0] == -1.0);

  const bos::TridiagonalOperator t2 = bos::reflect_minus(bos::build_truncated(0.3, 2));
  CHECK(t2.diag[0] == -1.0);
  CHECK(t2.diag[1] == -2.0);
}

TEST_CASE("reflect_minus spectrum is the negated spectrum") {
  // The unitary identification is not printed in closed form; numerically the
  // reflected section's eigenvalues are the negatives of the original ones
  // (as sets; the small section has complex conjugate pairs).
  const bos::TridiagonalOperator t = bos::build_truncated(0.5, 6);
  const bos::TridiagonalOperator r = bos::reflect_minus(t);
  Eigen::EigenSolver<Eigen::MatrixXd> es_t(dense_of(t)), es_r(dense_of(r));
  std::vector<cplx> a, b;
  for (long i = 0; i < 6; ++i) {
    a.push_back(es_t.eigenvalues()(i));
    b.push_back(-es_r.eigenvalues()(i));
  }
  double negated = 0.0, same = 1e300;
  for (const cplx& x : a) {
    double best_neg = 1e300, best_same = 1e300;
    for (const cplx& y : b) {
      best_neg = std::min(best_neg, std::abs(x - y));
      best_same = std::min(best_same, std::abs(x + y));
    }
    negated = std::max(negated, best_neg);
    same = std::min(same, best_same);
  }
  CHECK(negated <= 1e-12 * 10.0);  // spec(reflect) == -spec(T)
  CHECK(same > 0.1);               // spec(reflect) != spec(T)
}

TEST_CASE("epsilon resonance guard") {
  CHECK_THROWS_AS(bos::EpsilonParam(1.0).require_nonresonant(), std::invalid_argument);
  CHECK_THROWS_AS(bos::EpsilonParam(0.5).require_nonresonant(), std::invalid_argument);
  CHECK_THROWS_AS(bos::EpsilonParam(1.0 / 3.0).require_nonresonant(),
                  std::invalid_argument);
  CHECK_NOTHROW(bos::EpsilonParam(0.7).require_nonresonant());
  CHECK_NOTHROW(bos::EpsilonParam(1.3).require_nonresonant());
  CHECK(bos::is_resonant(1.0));
  CHECK(!bos::is_resonant(1.3));
  // the diagnostic names the integer
  try {
    bos::EpsilonParam(0.25).require_nonresonant();
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find('4') != std::string::npos);
  }
}
