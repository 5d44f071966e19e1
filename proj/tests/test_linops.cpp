#include <cmath>

#include "doctest.h"
#include "neel/linops.hpp"
#include "neel/profiles.hpp"

using namespace neel;

namespace {

struct Walls {
  Profile stat, moving;
  Walls() {
    Grid g(40.0, 512);
    stat = solve_static(g, 1e-10);
    moving = solve_traveling(g, 1e-3, 1.0, 1e-10, stat);
  }
};

const Walls& walls() {
  static Walls w;
  return w;
}

StateVector random_state(const Grid& g, unsigned long long seed) {
  return StateVector(random_bandlimited(g, seed, 0.5), random_bandlimited(g, seed + 1, 0.5));
}

double diff_norm(const StateVector& a, const StateVector& b) {
  return (stack(a) - stack(b)).norm();
}

}  // namespace

TEST_SUITE("linops") {

TEST_CASE("static linearization annihilates the translation mode") {
  const Profile& p = walls().stat;
  DiscretizedOperator L = build_L(p);
  Field d = p.derivative1();
  CHECK(norm(L.apply(d), NormKind::L2) / norm(d, NormKind::L2) < 1e-6);
  CHECK((L.matrix - L.matrix.transpose()).norm() / L.matrix.norm() < 1e-12);
}

TEST_CASE("moving linearization annihilates the comoving translation mode") {
  const Profile& m = walls().moving;
  Field d = m.derivative1();
  CHECK(norm(build_Lc(m).apply(d), NormKind::L2) / norm(d, NormKind::L2) < 1e-6);
  StateVector T(d, Field::zeros(d.grid));
  CHECK(norm(build_block(m, true, 1.0).apply(T)) / norm(T) < 1e-6);
}

TEST_CASE("builders reject inadmissible profiles") {
  CHECK_THROWS_AS(build_L(walls().moving), std::invalid_argument);
  Profile fast = walls().moving;
  fast.c = 1.0;
  CHECK_THROWS_AS(build_Lc(fast), std::invalid_argument);
}

TEST_CASE("block operator has the companion structure") {
  const Profile& p = walls().stat;
  DiscretizedOperator A = build_block(p, false, 0.7);
  const int n = p.theta.grid.n;
  CHECK(A.matrix.topLeftCorner(n, n).norm() == 0.0);
  CHECK((A.matrix.topRightCorner(n, n) - MatrixXd::Identity(n, n)).norm() == 0.0);
  CHECK((A.matrix.bottomRightCorner(n, n) + 0.7 * MatrixXd::Identity(n, n)).norm() < 1e-14);
  CHECK((A.matrix.bottomLeftCorner(n, n) + build_L(p).matrix).norm() < 1e-12);
}

TEST_CASE("S is minus the lower-left block of B_c") {
  const Walls& w = walls();
  DiscretizedOperator B = build_Bc(w.moving, w.stat);
  const int n = w.stat.theta.grid.n;
  MatrixXd S = build_S(w.moving, w.stat);
  CHECK((S + B.matrix.bottomLeftCorner(n, n)).norm() / S.norm() < 1e-10);
  CHECK(B.matrix.topRows(n).norm() == 0.0);
}

TEST_CASE("B_c vanishes at zero speed") {
  const Profile& p = walls().stat;
  CHECK(build_Bc(p, p).matrix.norm() == 0.0);
}

TEST_CASE("stack and unstack are inverse") {
  Grid g(10.0, 32);
  StateVector U = random_state(g, 4);
  StateVector V = unstack(g, stack(U));
  CHECK(U.u.values == V.u.values);
  CHECK(U.v.values == V.v.values);
}

TEST_CASE("weighted matrix is a similarity transform") {
  Grid g(20.0, 64);
  Profile p = solve_static(g, 1e-10);
  DiscretizedOperator A = build_block(p, false, 1.0);
  MatrixXd Aw = A.weighted();
  MatrixXd back = block_weight(g, -0.5) * Aw * block_weight(g, 0.5);
  CHECK((back - A.matrix).norm() / A.matrix.norm() < 1e-12);
}

TEST_CASE("spectral projector agrees with the closed-form zero-speed projector") {
  const Profile& p = walls().stat;
  const double nu = 1.0;
  DiscretizedOperator A = build_block(p, false, nu);
  NullPair np = null_pair(A, p);
  CHECK(np.separation > 1e6);
  CHECK(np.left_residual < 1e-8);
  Field d = p.derivative1();
  for (unsigned long long seed : {1ULL, 7ULL, 19ULL}) {
    StateVector U = random_state(p.theta.grid, seed);
    StateVector PU = project(np, U);
    double alpha = (nu * inner(U.u, d) + inner(U.v, d)) / (nu * inner(d, d));
    StateVector P0U = U;
    for (int j = 0; j < d.grid.n; ++j) P0U.u.values[j] -= alpha * d.values[j];
    CHECK(diff_norm(PU, P0U) / stack(U).norm() < 1e-9);
  }
  MatrixXd P = projector_matrix(np);
  CHECK((P * P - P).norm() / P.norm() < 1e-12);
  CHECK((P * A.matrix - A.matrix * P).norm() / A.matrix.norm() < 1e-8);
}

TEST_CASE("inverse of A on the range of the projector") {
  const Profile& p = walls().stat;
  const double nu = 1.0;
  DiscretizedOperator A = build_block(p, false, nu);
  NullPair np = null_pair(A, p);
  APerpInverse inv(p, nu);
  StateVector U = project(np, random_state(p.theta.grid, 3));
  StateVector X = inv.apply(U);
  CHECK(diff_norm(A.apply(X), U) / stack(U).norm() < 1e-7);
  Field f = random_bandlimited(p.theta.grid, 8, 0.5);
  Field u = inv.L_perp_inverse(f);
  CHECK(std::abs(inner(u, p.derivative1())) < 1e-10);
}

}
