#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "neel/energy.hpp"

namespace neel {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Linearization of the profile equation about psi:
// -(1 - c^2) D2 + S T S - c nu D1 - diag(c_psi - H s_psi).
MatrixXd assemble_Lc(const Field& psi, double c, double nu, double H, Mode mode = Mode::nonlocal);

// Dense LAPACK-backed kernels.
VectorXd lu_solve(MatrixXd A, const VectorXd& b);
VectorXd sym_eigenvalues(MatrixXd A);
void sym_eigen(MatrixXd A, VectorXd& values, MatrixXd& vectors);
VectorXcd eigenvalues(MatrixXd A);

// LU factorization with partial pivoting, reusable for several right-hand sides.
class LU {
 public:
  explicit LU(MatrixXd A);
  VectorXd solve(const VectorXd& b, bool transpose = false) const;
  int size() const { return static_cast<int>(lu_.rows()); }

 private:
  MatrixXd lu_;
  std::vector<int> piv_;
};

// Complex Schur factorization A = Q T Q^H.
struct Schur {
  MatrixXcd Q;
  MatrixXcd T;
};
Schur complex_schur(const MatrixXcd& A);

}  // namespace neel
