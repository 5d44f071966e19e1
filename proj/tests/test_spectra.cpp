#include <cmath>
#include <random>

#include "doctest.h"
#include "neel/spectra.hpp"

using namespace neel;

namespace {

struct Setup {
  Profile stat, moving;
  DiscretizedOperator L, A, Ac;
  SpectrumReport rL, rA, rAc;
  Setup() {
    Grid g(40.0, 256);
    stat = solve_static(g, 1e-10);
    moving = solve_traveling(g, 1e-3, 1.0, 1e-10, stat);
    L = build_L(stat);
    A = build_block(stat, false, 1.0);
    Ac = build_block(moving, true, 1.0);
    rL = eig_report(L, stat);
    rA = eig_report(A, stat);
    rAc = eig_report(Ac, moving);
  }
};

const Setup& setup() {
  static Setup s;
  return s;
}

}  // namespace

TEST_SUITE("spectra") {

TEST_CASE("pencil roots solve the quadratic") {
  for (double Lam : {0.0, 0.1, 0.25, 3.0}) {
    auto [a, b] = pencil_roots(Lam, 1.0);
    for (cplx z : {a, b}) CHECK(std::abs(z * z + z + Lam) < 1e-13);
  }
  auto [z0, z1] = pencil_roots(0.0, 1.0);
  CHECK(std::min(std::abs(z0), std::abs(z1)) < 1e-15);
  CHECK(std::min(z0.real(), z1.real()) == doctest::Approx(-1.0));
}

TEST_CASE("static report: isolated zero and positive gap") {
  const SpectrumReport& r = setup().rL;
  CHECK(std::abs(r.lambda0) < 1e-4);
  CHECK(r.Lambda0 > 0.9);
  CHECK(r.cluster == 1);
  for (size_t i = 1; i < r.eigenvalues.size(); ++i) CHECK(r.eigenvalues[i - 1].real() >= r.eigenvalues[i].real());
}

TEST_CASE("block spectrum is the pencil image of the static spectrum") {
  PencilCheck pc = pencil_crosscheck(setup().rL, setup().rA, 1.0);
  CHECK(pc.unmatched.empty());
  CHECK(pc.max_distance < 1e-9);
  CHECK(setup().rA.count_inside(0.25) == 1);
  CHECK(setup().rA.max_re_rest() == doctest::Approx(-0.5).epsilon(1e-8));
}

TEST_CASE("moving block spectrum keeps one eigenvalue inside the square") {
  const SpectrumReport& r = setup().rAc;
  CHECK(r.count_inside(0.25) == 1);
  CHECK(r.max_re_rest() < -0.25);
  DriftReport d = eigen_drift(setup().rA, r, setup().moving.c);
  CHECK(d.matched > 10);
  CHECK(d.C < 10.0);
}

TEST_CASE("gamma contour corners") {
  auto z = gamma_contour(0.25, 4);
  REQUIRE(z.size() == 4);
  CHECK(z[0] == cplx(0.25, 0.25));
  CHECK(z[1] == cplx(-0.25, 0.25));
  CHECK(z[2] == cplx(-0.25, -0.25));
  CHECK(z[3] == cplx(0.25, -0.25));
  CHECK_THROWS(gamma_contour(0.25, 3));
}

TEST_CASE("sweep points lie in G and carry region labels") {
  SweepOptions o;
  o.radii = 10;
  o.angles = 10;
  o.gamma_points = 16;
  auto pts = sweep_points(0.25, 1.0, o, 2.0);
  CHECK(pts.size() == 116);
  for (const auto& p : pts) {
    cplx l = p.lambda;
    CHECK(l.real() >= -0.25 - 1e-12);
    CHECK_FALSE((std::abs(l.real()) < 0.25 - 1e-12 && std::abs(l.imag()) < 0.25 - 1e-12));
    if (p.region == "G1") CHECK((l.real() > 2.0 && std::abs(l.imag()) <= 0.25));
    if (p.region == "G2") CHECK(std::abs(l.imag()) > 0.25);
  }
}

TEST_CASE("resolvent engine agrees with a dense singular value oracle") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  const int m = 40;
  MatrixXd B(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) B(i, j) = nd(rng) / std::sqrt(double(m));
  ResolventEngine eng(B);
  for (cplx l : {cplx(2.5, 0.3), cplx(-0.1, 1.7), cplx(0.0, 4.0)}) {
    MatrixXcd M = B.cast<cplx>() - l * MatrixXcd::Identity(m, m);
    MatrixXcd R = M.inverse();
    Eigen::JacobiSVD<MatrixXcd> s1(R), s2(B.cast<cplx>() * R);
    ResolventSample s = eng.evaluate(l);
    CHECK(s.norm_inv == doctest::Approx(s1.singularValues()(0)).epsilon(1e-5));
    CHECK(s.norm_Ares == doctest::Approx(s2.singularValues()(0)).epsilon(1e-5));
  }
  CHECK_THROWS_AS(eng.evaluate(eng.eigenvalues()(0)), std::domain_error);
}

TEST_CASE("numerical abscissa bounds the spectrum") {
  ResolventEngine eng(setup().A);
  double maxre = -1e300;
  for (int i = 0; i < eng.eigenvalues().size(); ++i) maxre = std::max(maxre, eng.eigenvalues()(i).real());
  CHECK(eng.numerical_abscissa() >= maxre - 1e-10);
}

TEST_CASE("small resolvent sweep is finite with the G1 envelope") {
  SweepOptions o;
  o.radii = 8;
  o.angles = 8;
  o.gamma_points = 16;
  SweepResult r = resolvent_sweep(setup().A, 0.25, o);
  CHECK(std::isfinite(r.sup_inv));
  CHECK(std::isfinite(r.sup_A));
  CHECK_FALSE(r.flagged);
  CHECK(r.envelope_excess <= 1.0);
}

TEST_CASE("relative bound is zero at zero speed and small for small speed") {
  BoundFit z = relative_bound_fit(setup().stat, setup().stat, 50, 1);
  CHECK(z.a == 0.0);
  CHECK(z.b == 0.0);
  BoundFit b = relative_bound_fit(setup().moving, setup().stat, 100, 1);
  CHECK(b.b < 1.0);
  CHECK(b.a_star > 0.0);
  CHECK(b.a <= b.a_star);
  CHECK(b.b <= b.b_star);
}

TEST_CASE("resolvent identity and constants from random trials") {
  InequalityTrials t = res_inequality_trials(setup().stat, 1.0, setup().rL.Lambda0, 0.25, 20, 3);
  CHECK(t.trials == 20);
  CHECK(t.a_holds == 20);
  CHECK(t.a_identity_error < 1e-10);
  CHECK(std::isfinite(t.C1));
  CHECK(std::isfinite(t.C2));
}

}
