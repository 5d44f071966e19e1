#include "neel/linops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace neel {

std::string to_string(OpKind k) {
  switch (k) {
    case OpKind::L: return "L";
    case OpKind::Lc: return "Lc";
    case OpKind::A: return "A";
    case OpKind::Ac: return "Ac";
    case OpKind::Bc: return "Bc";
  }
  return "?";
}

Vec DiscretizedOperator::fourier_weights() const {
  Vec w(grid.n / 2 + 1, 1.0);
  if (is_block())
    for (int j = 0; j <= grid.n / 2; ++j) w[j] = 1.0 + grid.k(j) * grid.k(j);
  return w;
}

MatrixXd block_weight(const Grid& g, double s) {
  const int n = g.n;
  MatrixXd W = MatrixXd::Identity(2 * n, 2 * n);
  W.topLeftCorner(n, n) = dense_sobolev(g, s);
  return W;
}

MatrixXd DiscretizedOperator::weighted() const {
  if (!is_block()) return matrix;
  const int n = grid.n;
  MatrixXd Sp = dense_sobolev(grid, 0.5);
  MatrixXd Sm = dense_sobolev(grid, -0.5);
  MatrixXd B(2 * n, 2 * n);
  B.topLeftCorner(n, n) = Sp * matrix.topLeftCorner(n, n) * Sm;
  B.topRightCorner(n, n) = Sp * matrix.topRightCorner(n, n);
  B.bottomLeftCorner(n, n) = matrix.bottomLeftCorner(n, n) * Sm;
  B.bottomRightCorner(n, n) = matrix.bottomRightCorner(n, n);
  return B;
}

Eigen::Map<const VectorXd> as_vector(const Field& f) {
  return Eigen::Map<const VectorXd>(f.values.data(), static_cast<Eigen::Index>(f.values.size()));
}

VectorXd stack(const StateVector& U) {
  const int n = U.u.grid.n;
  VectorXd x(2 * n);
  x.head(n) = as_vector(U.u);
  x.tail(n) = as_vector(U.v);
  return x;
}

StateVector unstack(const Grid& g, const VectorXd& x) {
  const int n = g.n;
  Field u = Field::zeros(g), v = Field::zeros(g);
  for (int j = 0; j < n; ++j) {
    u.values[j] = x[j];
    v.values[j] = x[n + j];
  }
  return StateVector(u, v);
}

StateVector DiscretizedOperator::apply(const StateVector& U) const {
  if (!is_block()) throw std::invalid_argument("scalar operator applied to a state vector");
  return unstack(grid, matrix * stack(U));
}

Field DiscretizedOperator::apply(const Field& u) const {
  if (is_block()) throw std::invalid_argument("block operator applied to a scalar field");
  VectorXd y = matrix * as_vector(u);
  Field out = Field::zeros(grid);
  for (int j = 0; j < grid.n; ++j) out.values[j] = y[j];
  return out;
}

DiscretizedOperator build_L(const Profile& stat) {
  if (!stat.is_static()) throw std::invalid_argument("L requires the static profile");
  DiscretizedOperator op;
  op.kind = OpKind::L;
  op.grid = stat.theta.grid;
  op.nu = stat.nu;
  op.matrix = assemble_Lc(stat.theta, 0.0, stat.nu, 0.0, stat.mode);
  return op;
}

DiscretizedOperator build_Lc(const Profile& moving) {
  if (!(std::abs(moving.c) < 1.0)) throw std::invalid_argument("L_c requires |c| < 1");
  DiscretizedOperator op;
  op.kind = OpKind::Lc;
  op.grid = moving.theta.grid;
  op.nu = moving.nu;
  op.c = moving.c;
  op.H = moving.H;
  op.matrix = assemble_Lc(moving.theta, moving.c, moving.nu, moving.H, moving.mode);
  return op;
}

DiscretizedOperator build_block(const Profile& p, bool with_c, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("damping nu must be positive");
  const double c = with_c ? p.c : 0.0;
  const double H = with_c ? p.H : 0.0;
  if (!(std::abs(c) < 1.0)) throw std::invalid_argument("A_c requires |c| < 1");
  const Grid& g = p.theta.grid;
  const int n = g.n;
  DiscretizedOperator op;
  op.kind = with_c ? OpKind::Ac : OpKind::A;
  op.grid = g;
  op.nu = nu;
  op.c = c;
  op.H = H;
  op.matrix = MatrixXd::Zero(2 * n, 2 * n);
  op.matrix.topRightCorner(n, n) = MatrixXd::Identity(n, n);
  op.matrix.bottomLeftCorner(n, n) = -assemble_Lc(p.theta, c, nu, H, p.mode);
  MatrixXd br = -nu * MatrixXd::Identity(n, n);
  if (c != 0.0) br += 2.0 * c * dense_derivative(g, 1);
  op.matrix.bottomRightCorner(n, n) = br;
  return op;
}

DiscretizedOperator build_Bc(const Profile& moving, const Profile& stat) {
  if (!(moving.theta.grid == stat.theta.grid)) throw std::invalid_argument("profiles on different grids");
  DiscretizedOperator a = build_block(stat, false, moving.nu);
  DiscretizedOperator ac = build_block(moving, true, moving.nu);
  DiscretizedOperator op = ac;
  op.kind = OpKind::Bc;
  op.matrix = ac.matrix - a.matrix;
  return op;
}

MatrixXd build_S(const Profile& moving, const Profile& stat) {
  const Grid& g = moving.theta.grid;
  const int n = g.n;
  const double c = moving.c, nu = moving.nu, H = moving.H;
  FormCoefficients fp = form_coefficients(moving.theta, moving.mode == Mode::nonlocal);
  FormCoefficients fs = form_coefficients(stat.theta, stat.mode == Mode::nonlocal);
  MatrixXd S = c * c * dense_derivative(g, 2) - c * nu * dense_derivative(g, 1);
  if (moving.mode == Mode::nonlocal) {
    MatrixXd T = dense_T(g, phase_parity(moving.theta));
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) S(i, j) += (fp.s[i] * fp.s[j] - fs.s[i] * fs.s[j]) * T(i, j);
  } else {
    for (int i = 0; i < n; ++i) S(i, i) += fp.s[i] * fp.s[i] - fs.s[i] * fs.s[i];
  }
  for (int i = 0; i < n; ++i) S(i, i) += fs.c[i] - fp.c[i] + H * fp.s[i];
  return S;
}

namespace {

// Euclidean coordinates of the weighted pairing: <U, V>_W = (W U) . V * dx.
VectorXd weight_apply(const Grid& g, const VectorXd& x, double power) {
  const int n = g.n;
  VectorXd y = x;
  Vec u(x.data(), x.data() + n), out(n);
  std::vector<cplx> F = kernel::rfft(g, u);
  for (int j = 0; j <= n / 2; ++j) F[j] *= std::pow(1.0 + g.k(j) * g.k(j), power);
  out = kernel::irfft(g, F);
  for (int j = 0; j < n; ++j) y[j] = out[j];
  return y;
}

}  // namespace

NullPair null_pair(const DiscretizedOperator& op, const Profile& p, const VectorXcd* eigs) {
  if (!op.is_block()) throw std::invalid_argument("null pair requires a block operator");
  const Grid& g = op.grid;
  const int n = g.n;
  VectorXcd ev = eigs ? *eigs : eigenvalues(op.matrix);
  std::vector<double> mags(ev.size());
  for (int i = 0; i < ev.size(); ++i) mags[i] = std::abs(ev[i]);
  std::vector<double> sorted = mags;
  std::partial_sort(sorted.begin(), sorted.begin() + 2, sorted.end());
  NullPair np;
  np.separation = sorted[1] / std::max(sorted[0], 1e-300);
  if (sorted[1] < 10.0 * sorted[0])
    throw std::runtime_error("eigenvalue nearest zero is not separated from the rest of the spectrum");
  double lambda0 = sorted[0];

  Field d1 = p.derivative1();
  np.right = StateVector(d1, Field::zeros(g));

  // Inverse iteration on A^T for the left null vector y; the weighted adjoint
  // null vector is W^{-1} y.
  MatrixXd At = op.matrix.transpose();
  double sigma = 1e-9 + lambda0;
  for (int i = 0; i < 2 * n; ++i) At(i, i) -= sigma;
  LU lu(std::move(At));
  VectorXd y = VectorXd::Zero(2 * n);
  y.head(n) = op.nu * as_vector(d1);
  y.tail(n) = as_vector(d1);
  y.normalize();
  for (int it = 0; it < 3; ++it) {
    y = lu.solve(y);
    y.normalize();
  }
  VectorXd left = weight_apply(g, y, -1.0);
  np.left = unstack(g, left);
  double ln = norm(np.left);
  for (double& v : np.left.u.values) v /= ln;
  for (double& v : np.left.v.values) v /= ln;
  double rn = norm(np.right);
  for (double& v : np.right.u.values) v /= rn;
  np.overlap = inner(np.right, np.left);

  StateVector ar = op.apply(np.right);
  np.right_residual = norm(ar) / norm(np.right);
  // Weighted adjoint residual: W^{-1} A^T W psi.
  VectorXd wl = weight_apply(g, stack(np.left), 1.0);
  VectorXd atw = op.matrix.transpose() * wl;
  np.left_residual = norm(unstack(g, weight_apply(g, atw, -1.0))) / norm(np.left);
  return np;
}

StateVector project(const NullPair& np, const StateVector& U) {
  double a = inner(U, np.left) / np.overlap;
  StateVector out = U;
  for (size_t j = 0; j < out.u.values.size(); ++j) {
    out.u.values[j] -= a * np.right.u.values[j];
    out.v.values[j] -= a * np.right.v.values[j];
  }
  return out;
}

MatrixXd projector_matrix(const NullPair& np) {
  const Grid& g = np.right.u.grid;
  const int n = g.n;
  VectorXd r = stack(np.right);
  VectorXd wl = weight_apply(g, stack(np.left), 1.0) * g.dx();
  MatrixXd P = MatrixXd::Identity(2 * n, 2 * n);
  P -= (r * wl.transpose()) / np.overlap;
  return P;
}

namespace {

MatrixXd bordered_L(const Profile& stat, double nu, const Field& t) {
  const int n = t.grid.n;
  MatrixXd K = MatrixXd::Zero(n + 1, n + 1);
  K.topLeftCorner(n, n) = assemble_Lc(stat.theta, 0.0, nu, 0.0, stat.mode);
  for (int j = 0; j < n; ++j) {
    K(j, n) = t.values[j];
    K(n, j) = t.values[j];
  }
  return K;
}

}  // namespace

APerpInverse::APerpInverse(const Profile& stat, double nu)
    : grid_(stat.theta.grid), nu_(nu), t_(stat.derivative1()), tt_(inner(t_, t_)),
      lu_(bordered_L(stat, nu, t_)) {
  if (!(nu > 0.0)) throw std::invalid_argument("damping nu must be positive");
}

Field APerpInverse::L_perp_inverse(const Field& f) const {
  const int n = grid_.n;
  VectorXd b = VectorXd::Zero(n + 1);
  const double a = inner(f, t_) / tt_;
  for (int j = 0; j < n; ++j) b[j] = f.values[j] - a * t_.values[j];
  VectorXd x = lu_.solve(b);
  Field out = Field::zeros(grid_);
  for (int j = 0; j < n; ++j) out.values[j] = x[j];
  return out;
}

StateVector APerpInverse::apply(const StateVector& Ubar) const {
  const int n = grid_.n;
  const double alpha = inner(Ubar.u, t_) / tt_;
  Field u = Ubar.u, v = Ubar.v;
  for (int j = 0; j < n; ++j) {
    u.values[j] -= alpha * t_.values[j];
    v.values[j] += nu_ * alpha * t_.values[j];
  }
  Field Lu = L_perp_inverse(u), Lv = L_perp_inverse(v);
  Field x1 = Field::zeros(grid_), x2 = Field::zeros(grid_);
  for (int j = 0; j < n; ++j) {
    x1.values[j] = -nu_ * Lu.values[j] - Lv.values[j] - alpha / nu_ * t_.values[j];
    x2.values[j] = u.values[j] + alpha * t_.values[j];
  }
  return StateVector(x1, x2);
}

StateVector apply_A_perp_inverse(const Profile& stat, double nu, const StateVector& Ubar) {
  return APerpInverse(stat, nu).apply(Ubar);
}

}  // namespace neel
