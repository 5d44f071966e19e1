#include "neel/dense.hpp"

#include <lapacke.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace neel {

MatrixXd assemble_Lc(const Field& psi, double c, double nu, double H, Mode mode) {
  const Grid& g = psi.grid;
  const int n = g.n;
  FormCoefficients fc = form_coefficients(psi, mode == Mode::nonlocal);
  MatrixXd M = -(1.0 - c * c) * dense_derivative(g, 2);
  if (c != 0.0) M -= c * nu * dense_derivative(g, 1);
  if (mode == Mode::nonlocal) {
    MatrixXd T = dense_T(g, phase_parity(psi));
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) M(i, j) += fc.s[i] * T(i, j) * fc.s[j];
  } else {
    for (int i = 0; i < n; ++i) M(i, i) += fc.s[i] * fc.s[i];
  }
  for (int i = 0; i < n; ++i) M(i, i) -= fc.c[i] - H * fc.s[i];
  return M;
}

VectorXd lu_solve(MatrixXd A, const VectorXd& b) {
  const int n = static_cast<int>(A.rows());
  VectorXd x = b;
  std::vector<lapack_int> piv(n);
  lapack_int info = LAPACKE_dgesv(LAPACK_COL_MAJOR, n, 1, A.data(), n, piv.data(), x.data(), n);
  if (info != 0) throw std::runtime_error("dense solve failed (dgesv info " + std::to_string(info) + ")");
  return x;
}

VectorXd sym_eigenvalues(MatrixXd A) {
  const int n = static_cast<int>(A.rows());
  VectorXd w(n);
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, A.data(), n, w.data());
  if (info != 0) throw std::runtime_error("symmetric eigensolver failed (dsyevd info " + std::to_string(info) + ")");
  return w;
}

void sym_eigen(MatrixXd A, VectorXd& values, MatrixXd& vectors) {
  const int n = static_cast<int>(A.rows());
  values.resize(n);
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, A.data(), n, values.data());
  if (info != 0) throw std::runtime_error("symmetric eigensolver failed (dsyevd info " + std::to_string(info) + ")");
  vectors = std::move(A);
}

VectorXcd eigenvalues(MatrixXd A) {
  const int n = static_cast<int>(A.rows());
  VectorXd wr(n), wi(n);
  double dummy = 0.0;
  lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, A.data(), n, wr.data(), wi.data(),
                                  &dummy, 1, &dummy, 1);
  if (info != 0) throw std::runtime_error("eigensolver failed (dgeev info " + std::to_string(info) + ")");
  VectorXcd out(n);
  for (int i = 0; i < n; ++i) out[i] = {wr[i], wi[i]};
  return out;
}

LU::LU(MatrixXd A) : lu_(std::move(A)), piv_(lu_.rows()) {
  const int n = static_cast<int>(lu_.rows());
  std::vector<lapack_int> p(n);
  lapack_int info = LAPACKE_dgetrf(LAPACK_COL_MAJOR, n, n, lu_.data(), n, p.data());
  if (info < 0) throw std::runtime_error("LU factorization failed (dgetrf info " + std::to_string(info) + ")");
  for (int i = 0; i < n; ++i) piv_[i] = static_cast<int>(p[i]);
}

VectorXd LU::solve(const VectorXd& b, bool transpose) const {
  const int n = size();
  VectorXd x = b;
  std::vector<lapack_int> p(piv_.begin(), piv_.end());
  lapack_int info = LAPACKE_dgetrs(LAPACK_COL_MAJOR, transpose ? 'T' : 'N', n, 1, lu_.data(), n, p.data(),
                                   x.data(), n);
  if (info != 0) throw std::runtime_error("LU solve failed (dgetrs info " + std::to_string(info) + ")");
  return x;
}

Schur complex_schur(const MatrixXcd& A) {
  const int n = static_cast<int>(A.rows());
  Schur s;
  s.T = A;
  s.Q.resize(n, n);
  VectorXcd w(n);
  lapack_int sdim = 0;
  lapack_int info = LAPACKE_zgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, n,
                                  reinterpret_cast<lapack_complex_double*>(s.T.data()), n, &sdim,
                                  reinterpret_cast<lapack_complex_double*>(w.data()),
                                  reinterpret_cast<lapack_complex_double*>(s.Q.data()), n);
  if (info != 0) throw std::runtime_error("Schur factorization failed (zgees info " + std::to_string(info) + ")");
  return s;
}

}  // namespace neel
