#pragma once

#include <string>

#include "neel/dense.hpp"
#include "neel/profiles.hpp"

namespace neel {

enum class OpKind { L, Lc, A, Ac, Bc };

std::string to_string(OpKind k);

struct DiscretizedOperator {
  OpKind kind = OpKind::L;
  MatrixXd matrix;  // real entries; block kinds are 2n x 2n
  Grid grid;
  double nu = 1.0;
  double c = 0.0;
  double H = 0.0;

  bool is_block() const { return kind == OpKind::A || kind == OpKind::Ac || kind == OpKind::Bc; }
  int dim() const { return static_cast<int>(matrix.rows()); }
  // Diagonal Fourier weights of the H1 x L2 (or L2) inner product, per rfft bin.
  Vec fourier_weights() const;
  // W^{1/2} M W^{-1/2}: the operator in coordinates where the weighted norm is Euclidean.
  MatrixXd weighted() const;
  StateVector apply(const StateVector& U) const;
  Field apply(const Field& u) const;
};

DiscretizedOperator build_L(const Profile& stat);
DiscretizedOperator build_Lc(const Profile& moving);
// A (with_c false, on the static frame) or A_c (with_c true).
DiscretizedOperator build_block(const Profile& p, bool with_c, double nu);
// B_c = A_c - A on a common frame: stat supplies A, moving supplies A_c.
DiscretizedOperator build_Bc(const Profile& moving, const Profile& stat);
// Direct assembly of S = L_c - L.
MatrixXd build_S(const Profile& moving, const Profile& stat);

// Block weight W^{s} = diag((1 + k^2)^s, 1) as a dense matrix of size 2n.
MatrixXd block_weight(const Grid& g, double s);

Eigen::Map<const VectorXd> as_vector(const Field& f);
VectorXd stack(const StateVector& U);
StateVector unstack(const Grid& g, const VectorXd& x);

struct NullPair {
  StateVector right;  // (psi', 0)
  StateVector left;   // null vector of the weighted adjoint
  double overlap = 0.0;
  double separation = 0.0;  // |second nearest eigenvalue| / |nearest eigenvalue|
  double right_residual = 0.0;
  double left_residual = 0.0;
};

// eigs are the eigenvalues of op when already known; otherwise computed.
NullPair null_pair(const DiscretizedOperator& op, const Profile& p, const VectorXcd* eigs = nullptr);

// P U = U - <U, left>/overlap * right in the H1 x L2 geometry.
StateVector project(const NullPair& np, const StateVector& U);
MatrixXd projector_matrix(const NullPair& np);

// Explicit inverse of A on ran(P) from the split u = u_perp + alpha thetabar'.
class APerpInverse {
 public:
  APerpInverse(const Profile& stat, double nu);
  StateVector apply(const StateVector& U) const;
  // L_perp^{-1} f for f orthogonal to thetabar' (the component along thetabar' is removed first).
  Field L_perp_inverse(const Field& f) const;

 private:
  Grid grid_;
  double nu_;
  Field t_;
  double tt_;
  LU lu_;
};
StateVector apply_A_perp_inverse(const Profile& stat, double nu, const StateVector& U);

}  // namespace neel
