#include <cmath>

#include "doctest.h"
#include "neel/dynamics.hpp"
#include "neel/profiles.hpp"

using namespace neel;

namespace {

const Profile& wall() {
  static Profile p = solve_static(Grid(40.0, 512), 1e-10);
  return p;
}

StateVector perturbed(const Profile& p, Shape s, double amp) {
  Field th = p.theta, q = perturbation_field(p.theta.grid, {s, amp, 1});
  for (int j = 0; j < th.grid.n; ++j) th.values[j] += q.values[j];
  return StateVector(th, Field::zeros(th.grid));
}

double distance(const StateVector& a, const StateVector& b) {
  Field du = Field::zeros(a.u.grid), dv = Field::zeros(a.u.grid);
  for (int j = 0; j < a.u.grid.n; ++j) {
    du.values[j] = a.u.values[j] - b.u.values[j];
    dv.values[j] = a.v.values[j] - b.v.values[j];
  }
  return norm(StateVector(du, dv));
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("frozen mode is integrated to second order") {
  for (Integrator in : {Integrator::semi_implicit, Integrator::rk4}) {
    ModeResult a = damped_mode(2.0, 1.0, 0.02, 10.0, in), b = damped_mode(2.0, 1.0, 0.01, 10.0, in);
    double ea = std::abs(a.u - a.u_exact), eb = std::abs(b.u - b.u_exact);
    CHECK(eb < ea);
    if (in == Integrator::semi_implicit) CHECK(ea / eb == doctest::Approx(4.0).epsilon(0.05));
    if (in == Integrator::rk4) CHECK(ea / eb > 12.0);
  }
  ModeResult crit = damped_mode(0.25, 1.0, 0.01, 5.0, Integrator::semi_implicit);
  CHECK(std::abs(crit.u - crit.u_exact) < 1e-5);
}

TEST_CASE("splitting step converges at second order") {
  StateVector S0 = perturbed(wall(), Shape::sech, 0.05);
  SimConfig c;
  c.check = false;
  std::vector<StateVector> r;
  for (double dt : {1e-2, 5e-3, 2.5e-3}) {
    c.dt = dt;
    r.push_back(step(c, S0, static_cast<int>(std::lround(0.5 / dt))));
  }
  double ratio = distance(r[0], r[1]) / distance(r[1], r[2]);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("energy balance defect is second order") {
  StateVector S0 = perturbed(wall(), Shape::sech, 0.05);
  SimConfig c;
  c.check = false;
  c.t_end = 4.0;
  double d[2];
  int i = 0;
  for (double dt : {4e-3, 2e-3}) {
    c.dt = dt;
    SimTrace tr = integrate(c, S0);
    d[i] = 0.0;
    for (double x : tr.defect) d[i] = std::max(d[i], std::abs(x));
    ++i;
  }
  CHECK(d[0] / d[1] >= 3.5);
  CHECK(d[1] < 1e-8);
}

TEST_CASE("energy decreases along the damped flow") {
  SimConfig c;
  c.check = false;
  c.t_end = 5.0;
  c.dt = 5e-3;
  SimTrace tr = integrate(c, perturbed(wall(), Shape::sech, 0.1));
  for (size_t i = 1; i < tr.energy.size(); ++i) CHECK(tr.energy[i] <= tr.energy[i - 1] + 1e-7);
  CHECK(tr.residual_H1.size() == tr.t.size());
  CHECK(std::isnan(tr.residual_H1[0]));
}

TEST_CASE("static wall is a fixed point of the right-hand side") {
  const Profile& p = wall();
  StateVector F = vector_field(StateVector(p.theta, Field::zeros(p.theta.grid)), 0.0, 1.0, 0.0);
  CHECK(norm(F.v, NormKind::L2) < 1e-8);
  CHECK(norm(F.u, NormKind::L2) == 0.0);
}

TEST_CASE("modulation recovers a translation") {
  const Profile& p = wall();
  Field moved = shift(p.theta, -0.3);
  Modulation m = modulate(moved, p, 0.0, 0.0);
  CHECK(m.s == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(std::abs(m.orthogonality) < 1e-10);
  CHECK(m.residual_H1 < 1e-8);
  Modulation far = modulate(shift(p.theta, -4.2), p, 1.0, 0.0);
  CHECK(far.s == doctest::Approx(3.2).epsilon(1e-8));
}

TEST_CASE("decay fit on an exact exponential") {
  std::vector<double> t, r;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(0.1 * i);
    r.push_back(0.3 * std::exp(-0.7 * t.back()));
  }
  DecayFit f = decay_fit(t, r, 1.0);
  CHECK(f.omega == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(f.C == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.clean());
  DecayFit cut = decay_fit(t, r, 0.0, 0.3 * std::exp(-0.7 * 5.0));
  CHECK(cut.points == 50);
}

TEST_CASE("configuration and stability guards") {
  SimConfig c;
  c.t_end = 5.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.check = false;
  c.dt = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.dt = 0.5;
  c.integrator = Integrator::rk4;
  CHECK_THROWS_AS(integrate(c, perturbed(wall(), Shape::sech, 0.05)), std::invalid_argument);
  SimConfig b;
  b.check = false;
  b.t_end = 1.0;
  b.blowup = 1e-3;
  CHECK_THROWS_AS(integrate(b, perturbed(wall(), Shape::sech, 0.05)), SimulationError);
}

TEST_CASE("perturbation shapes") {
  Grid g(40.0, 256);
  Field s = perturbation_field(g, {Shape::sech, 0.05, 1});
  Field o = perturbation_field(g, {Shape::odd_sech, 0.05, 1});
  Field n = perturbation_field(g, {Shape::noise, 0.05, 4});
  CHECK(s.values[g.n / 2] == doctest::Approx(0.05));
  CHECK(o.values[g.n / 2] == 0.0);
  CHECK(norm(n, NormKind::H1) == doctest::Approx(0.05));
}

TEST_CASE("odd perturbation relaxes back to the centred wall") {
  SimConfig c;
  c.t_end = 20.0;
  c.dt = 2e-3;
  OrbitalResult r = orbital_experiment(wall(), {Shape::odd_sech, 0.05, 1}, c);
  CHECK(r.stable);
  CHECK(r.fit.omega == doctest::Approx(0.5).epsilon(0.05));
  CHECK(std::abs(r.final_position) < 1e-3);
  CHECK(r.A2_ratio <= r.A2_bound);
  CHECK(r.A3_exponent == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("even perturbation settles at the linear-theory shift") {
  SimConfig c;
  c.t_end = 20.0;
  c.dt = 2e-3;
  OrbitalResult r = orbital_experiment(wall(), {Shape::sech, 0.05, 1}, c);
  CHECK(r.stable);
  CHECK(r.final_position == doctest::Approx(r.predicted_shift).epsilon(0.02));
  CHECK(std::abs(r.final_position) > 0.01);
}

}
