#include <cmath>
#include <numbers>

#include "doctest.h"
#include "neel/region.hpp"

using namespace neel;
using std::numbers::pi;

namespace {

const RegionParams kP(1.0, 0.25, 1.04, 0.75);

}  // namespace

TEST_SUITE("region") {

TEST_CASE("parameter invariants are enforced") {
  CHECK_THROWS_AS(RegionParams(0.0, 0.1, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(RegionParams(1.0, 0.5, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(RegionParams(1.0, 0.25, -1.0, 0.75), std::invalid_argument);
  CHECK_THROWS_AS(RegionParams(1.0, 0.25, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(RegionParams(1.0, 0.25, 1.0, 0.5), std::invalid_argument);
  CHECK_NOTHROW(RegionParams(1.0, 0.25, 1.0, 0.6));
}

TEST_CASE("S at the ends of the angle range") {
  cplx l(0.3, -1.2);
  CHECK(S_func(0.0, l, 1.0) == doctest::Approx(std::abs(l)));
  CHECK(S_func(pi / 2, l, 1.0) == doctest::Approx(std::abs(l + 1.0)));
}

TEST_CASE("S agrees with its substituted form") {
  double worst = 0.0;
  for (int i = 0; i <= 50; ++i)
    for (double re : {-0.2, 0.0, 0.7, 30.0})
      for (double im : {-5.0, 0.3, 100.0}) {
        double phi = pi / 2 * i / 50;
        cplx l(re, im);
        double S = S_func(phi, l, 1.0);
        worst = std::max(worst, std::abs(S * S - f2_form(-std::cos(2 * phi), l, 1.0)) / std::max(1.0, S * S));
      }
  CHECK(worst < 1e-14);
}

TEST_CASE("f_a at zero angle and the epsilon formula") {
  cplx l(0.1, 2.0);
  CHECK(f_a_func(0.0, l, 1.04, 1.0) == doctest::Approx(1.0 - a_of(l, 1.04, 1.0)));
  double k = (2 - 0.75) / std::sqrt(1.04);
  CHECK(epsilon_of(0.75, 1.0, 1.04) == doctest::Approx(2 * k / (4 * pi + (2 + pi) * k)));
}

TEST_CASE("region predicates") {
  CHECK(in_G(cplx(0.25, 0.1), 0.25));
  CHECK_FALSE(in_G(cplx(0.1, 0.1), 0.25));
  CHECK_FALSE(in_G(cplx(-0.3, 2.0), 0.25));
  CHECK(in_G2(cplx(0.1, 0.25), 0.25));
  CHECK(in_G2(cplx(5.0, -0.3), 0.25));
  CHECK_FALSE(in_G2(cplx(5.0, 0.1), 0.25));
  CHECK_FALSE(in_G2(cplx(0.25, 0.25), 0.25));
}

TEST_CASE("M is flagged infinite where both denominators vanish") {
  RegionParams p(1.0, 0.25, 0.25, 0.75);
  MValue m = M_func(pi / 4, cplx(-0.5, 0.0), p);
  CHECK(m.infinite);
  CHECK(std::isinf(m.value));
  MValue f = M_func(0.3, cplx(0.1, 2.0), kP);
  CHECK_FALSE(f.infinite);
  CHECK(f.value == doctest::Approx(std::min(f.first, f.second)));
}

TEST_CASE("first argument of M decays along the imaginary axis at pi/4") {
  double bound = 2 * std::sqrt(2.0) * std::sqrt(kP.Lambda0) / ((1 - kP.beta / 2) * kP.nu);
  for (double y : {10.0, 1e3, 1e6}) CHECK(M_func(pi / 4, cplx(0.0, y), kP).first <= bound);
}

TEST_CASE("lower bound on S holds on sampled points") {
  double ferr = 0.0;
  LemmaCheck c = check_aux0_lower(kP, 20000, 3, &ferr);
  CHECK(c.holds());
  CHECK(c.min_margin < 1e-2);
  CHECK(ferr < 1e-12);
}

TEST_CASE("second bound on S fails with the factor sqrt 2 and holds without it") {
  // nu = 1, lambda = i: min over phi of S is sqrt(0.2) < sqrt(2) / 3.
  double smin = 1e300;
  for (int i = 0; i <= 100000; ++i) smin = std::min(smin, S_func(pi / 2 * i / 100000, cplx(0.0, 1.0), 1.0));
  CHECK(smin == doctest::Approx(std::sqrt(0.2)).epsilon(1e-6));
  CHECK(smin < std::sqrt(2.0) * 0.5 / 1.5);
  CHECK_FALSE(check_aux0_second(kP, 20000, 3).holds());
  CHECK(check_aux0_second(kP, 20000, 3, 1.0).holds());
}

TEST_CASE("bounds on the admissible set") {
  CHECK(check_aux1(kP, 20000, 3).holds());
  CHECK(check_aux2(kP, 20000, 3, 0.5 * std::asin(kP.epsilon())).holds());
  LemmaCheck stated = check_aux2(kP, 20000, 3);
  CHECK_FALSE(stated.holds());
  CHECK(stated.worst_phi < 0.0);
}

TEST_CASE("M is bounded and its sampled supremum is stable") {
  MScan a = scan_M(kP, 200000, 5), b = scan_M(kP, 800000, 6);
  CHECK(a.infinite == 0);
  CHECK(std::isfinite(a.sup));
  CHECK(std::abs(b.sup - a.sup) / a.sup < 0.05);
  CHECK(a.H3_first_max <= a.H3_bound);
  CHECK(a.count_part[0] + a.count_part[1] + a.count_part[2] == a.samples);
}

TEST_CASE("appendix checks are reproducible") {
  AppendixReport a = appendix_check(kP, 5000, 20000, 11), b = appendix_check(kP, 5000, 20000, 11);
  REQUIRE(a.checks.size() == b.checks.size());
  for (size_t i = 0; i < a.checks.size(); ++i) {
    CHECK(a.checks[i].min_margin == b.checks[i].min_margin);
    CHECK(a.checks[i].violations == b.checks[i].violations);
  }
  CHECK(a.scan.sup == b.scan.sup);
  CHECK_THROWS(a.check("missing"));
}

}
