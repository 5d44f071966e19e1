#include <cmath>
#include <numbers>

#include "doctest.h"
#include "neel/dense.hpp"
#include "neel/spectral.hpp"

using namespace neel;
using std::numbers::pi;

namespace {

double sup_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Periodic Poisson kernel sum_j r^{|j|} e^{i j t} with r = e^{-a pi / L}, t = pi x / L.
double poisson(double r, double t) { return (1 - r * r) / (1 - 2 * r * std::cos(t) + r * r); }
double poisson_dr(double r, double t) {
  double den = 1 - 2 * r * std::cos(t) + r * r;
  return (-2 * r * den - (1 - r * r) * (2 * r - 2 * std::cos(t))) / (den * den);
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("grid spacing and wavenumbers") {
  Grid g(40.0, 64);
  CHECK(g.dx() == doctest::Approx(80.0 / 64));
  CHECK(g.x(0) == -40.0);
  CHECK(g.k(3) == doctest::Approx(3 * pi / 40));
  Vec k = g.wavenumbers();
  CHECK(k[1] == doctest::Approx(pi / 40));
  CHECK(k[32] == doctest::Approx(-32 * pi / 40));
  CHECK_THROWS(Grid(40.0, 63));
}

TEST_CASE("derivatives of a trigonometric mode are exact") {
  Grid g(10.0, 128);
  const double k = 5 * pi / 10;
  Field f = Field::sample(g, [&](double x) { return std::sin(k * x); });
  Field d1 = derivative(f, 1), d2 = derivative(f, 2);
  Vec e1(g.n), e2(g.n);
  for (int j = 0; j < g.n; ++j) {
    e1[j] = k * std::cos(k * g.x(j));
    e2[j] = -k * k * std::sin(k * g.x(j));
  }
  CHECK(sup_diff(d1.values, e1) < 1e-12);
  CHECK(sup_diff(d2.values, e2) < 1e-11);
}

TEST_CASE("half-Laplacian of the periodic Poisson kernel") {
  Grid g(40.0, 1024);
  const double a = 1.0, r = std::exp(-a * pi / g.L);
  Field f = Field::sample(g, [&](double x) { return poisson(r, pi * x / g.L); });
  Field h = half_laplacian(f);
  double err = 0.0, scale = 0.0;
  for (int j = 0; j < g.n; ++j) {
    double t = pi * g.x(j) / g.L;
    double exact = (pi / g.L) * r * poisson_dr(r, t);
    err = std::max(err, std::abs(h.values[j] - exact));
    scale = std::max(scale, std::abs(exact));
  }
  CHECK(err / scale < 1e-10);
}

TEST_CASE("T acts as 1 + |k| on periodic and half-integer modes") {
  Grid g(20.0, 256);
  const double k = 3 * pi / 20, kh = (2 * 3 - 1) * pi / (2 * 20.0);
  Field f = Field::sample(g, [&](double x) { return std::cos(k * x); });
  Field fa = Field::sample(g, [&](double x) { return std::cos(kh * x); });
  Field Tf = apply_T(f), Tfa = apply_T(fa, Parity::antiperiodic);
  Vec e(g.n), ea(g.n);
  for (int j = 0; j < g.n; ++j) {
    e[j] = (1 + k) * f.values[j];
    ea[j] = (1 + kh) * fa.values[j];
  }
  CHECK(sup_diff(Tf.values, e) < 1e-12);
  CHECK(sup_diff(Tfa.values, ea) < 1e-12);
}

TEST_CASE("dense T matches the spectral T") {
  Grid g(10.0, 64);
  Field u = random_bandlimited(g, 5);
  for (Parity p : {Parity::periodic, Parity::antiperiodic}) {
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(u.values.data(), g.n);
    Eigen::VectorXd y = dense_T(g, p) * x;
    Field Tu = apply_T(u, p);
    double err = 0.0;
    for (int j = 0; j < g.n; ++j) err = std::max(err, std::abs(y[j] - Tu.values[j]));
    CHECK(err < 1e-12);
  }
}

TEST_CASE("shift and interpolation reproduce translated modes") {
  Grid g(10.0, 128);
  const double k = 2 * pi / 10, s = 0.37;
  Field f = Field::sample(g, [&](double x) { return std::sin(k * x); });
  Field fs = shift(f, s);
  Vec e(g.n);
  for (int j = 0; j < g.n; ++j) e[j] = std::sin(k * (g.x(j) + s));
  CHECK(sup_diff(fs.values, e) < 1e-12);
  CHECK(evaluate(f, 1.2345) == doctest::Approx(std::sin(k * 1.2345)).epsilon(1e-12));
  CHECK(evaluate_derivative(f, -0.5) == doctest::Approx(k * std::cos(-0.5 * k)).epsilon(1e-12));
}

TEST_CASE("norms of a single mode") {
  Grid g(10.0, 128);
  const double k = 4 * pi / 10;
  Field f = Field::sample(g, [&](double x) { return std::sin(k * x); });
  CHECK(norm(f, NormKind::L2) == doctest::Approx(std::sqrt(g.L)).epsilon(1e-12));
  CHECK(norm(f, NormKind::H1) == doctest::Approx(std::sqrt((1 + k * k) * g.L)).epsilon(1e-12));
  CHECK(norm(f, NormKind::Hhalf_semi) == doctest::Approx(std::sqrt(k * g.L)).epsilon(1e-12));
}

TEST_CASE("wall background and reconstructed phase") {
  for (double x : {-3.0, -0.2, 0.0, 1.5, 30.0}) {
    CHECK(wall_phase(x) == doctest::Approx(std::asin(std::tanh(x))).epsilon(x < 10 ? 1e-14 : 1e-12));
    CHECK(wall_phase_d1(x) == doctest::Approx(1 / std::cosh(x)));
  }
  Grid g(10.0, 32);
  Field w = Field::zeros(g, Background::wall);
  CHECK(w.theta()[5] == doctest::Approx(wall_phase(g.x(5))));
  Field d = derivative(w, 1);
  CHECK(d.background == Background::none);
  CHECK(d.values[16] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("random band-limited fields are seeded and normalized") {
  Grid g(10.0, 64);
  Field a = random_bandlimited(g, 9), b = random_bandlimited(g, 9), c = random_bandlimited(g, 10);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(norm(a, NormKind::L2) == doctest::Approx(1.0));
}

TEST_CASE("fields with a background are rejected by norms") {
  Grid g(10.0, 32);
  CHECK_THROWS(norm(Field::zeros(g, Background::wall), NormKind::L2));
  Field bad = Field::zeros(g);
  bad.values[3] = std::nan("");
  CHECK_THROWS(bad.check_finite());
}

}
