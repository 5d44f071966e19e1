#include <cmath>

#include "doctest.h"
#include "neel/energy.hpp"
#include "neel/profiles.hpp"

using namespace neel;

TEST_SUITE("energy") {

TEST_CASE("local energy of the closed-form wall is two") {
  Grid g(40.0, 2048);
  Field th = Field::zeros(g, Background::wall);
  EnergyBreakdown e = energy(th, Mode::local);
  CHECK(e.total == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(e.exchange == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("closed-form wall is a critical point of the local energy") {
  Grid g(40.0, 1024);
  Field gr = grad_energy(Field::zeros(g, Background::wall), Mode::local);
  CHECK(norm(gr, NormKind::L2) < 1e-10);
}

TEST_CASE("gradient matches central differences") {
  Grid g(40.0, 1024);
  Field base = Field::zeros(g, Background::wall);
  Field q = random_bandlimited(g, 11, 0.05);
  for (int j = 0; j < g.n; ++j) base.values[j] += 0.1 * q.values[j];
  Field h = random_bandlimited(g, 3, 0.05);
  for (Mode m : {Mode::nonlocal, Mode::local}) {
    double d = inner(grad_energy(base, m), h);
    const double eps = 1e-5;
    Field a = base, b = base;
    for (int j = 0; j < g.n; ++j) {
      a.values[j] += eps * h.values[j];
      b.values[j] -= eps * h.values[j];
    }
    double fd = (energy(a, m).total - energy(b, m).total) / (2 * eps);
    CHECK(std::abs(fd - d) / std::abs(d) < 1e-7);
  }
}

TEST_CASE("energy is invariant under point reflection") {
  Grid g(40.0, 512);
  Field th = Field::zeros(g, Background::wall);
  Field q = random_bandlimited(g, 2, 0.1);
  for (int j = 0; j < g.n; ++j) th.values[j] += 0.05 * q.values[j];
  CHECK(energy(reflect(th)).total == doctest::Approx(energy(th).total).epsilon(1e-12));
}

TEST_CASE("phase parity follows the background") {
  Grid g(10.0, 32);
  CHECK(phase_parity(Field::zeros(g, Background::wall)) == Parity::antiperiodic);
  CHECK(phase_parity(Field::zeros(g)) == Parity::periodic);
}

TEST_CASE("stray energy is positive and vanishes in local mode") {
  Grid g(40.0, 512);
  Field th = Field::zeros(g, Background::wall);
  CHECK(energy(th).stray > 0.0);
  CHECK(energy(th).total > energy(th, Mode::local).total);
}

}
