#pragma once

#include <string>
#include <vector>

#include "neel/linops.hpp"

namespace neel {

struct SpectrumReport {
  OpKind kind = OpKind::L;
  Grid grid;
  std::vector<cplx> eigenvalues;  // sorted by real part, descending
  cplx lambda0{0.0, 0.0};         // eigenvalue nearest 0
  double gap = 0.0;               // -max Re over the rest; for L the second eigenvalue
  double Lambda0 = 0.0;           // L only: smallest eigenvalue after lambda0
  int cluster = 0;                // eigenvalues within 1e-6 (1 + |lambda0|) of lambda0
  double periodization = 0.0;     // cos(theta(-L + dx/2))

  // Eigenvalues strictly inside the square |Re| < delta, |Im| < delta.
  int count_inside(double delta) const;
  // max Re over eigenvalues other than lambda0.
  double max_re_rest() const;
};

SpectrumReport eig_report(const DiscretizedOperator& op, const Profile& p);

// Roots of lambda^2 + nu lambda + Lambda = 0.
std::pair<cplx, cplx> pencil_roots(double Lambda, double nu);

struct PencilCheck {
  double max_distance = 0.0;
  std::vector<cplx> unmatched;
};
PencilCheck pencil_crosscheck(const SpectrumReport& L, const SpectrumReport& A, double nu);

struct DriftReport {
  double C = 0.0;          // max matched |lambda_j(A_c) - lambda_j(A)| / |c|
  int matched = 0;
  std::vector<cplx> unmatched;
  double window = 0.0;
};
// Greedy nearest-neighbour pairing of the eigenvalues with |lambda| <= window,
// distance cap 10 |c|.
DriftReport eigen_drift(const SpectrumReport& A, const SpectrumReport& Ac, double c, double window = 5.0);

struct ResolventSample {
  cplx lambda;
  double norm_inv = 0.0;   // ||(A - lambda)^{-1}||
  double norm_Ares = 0.0;  // ||A (A - lambda)^{-1}||
  std::string region;
};

// Weighted resolvent norms from a complex Schur form of W^{1/2} M W^{-1/2}.
class ResolventEngine {
 public:
  explicit ResolventEngine(const DiscretizedOperator& op);
  explicit ResolventEngine(const MatrixXd& weighted);
  // Throws std::domain_error within 1e-8 of an eigenvalue.
  ResolventSample evaluate(cplx lambda, bool with_A = true);
  const VectorXcd& eigenvalues() const { return eig_; }
  int dim() const { return static_cast<int>(T_.rows()); }
  // Largest eigenvalue of the Hermitian part: the growth bound of the weighted semigroup.
  double numerical_abscissa() const { return abscissa_; }

 private:
  double power_inverse(cplx lambda, double shift_scale, Eigen::VectorXcd& warm);
  MatrixXcd T_;
  VectorXcd eig_;
  double abscissa_ = 0.0;
  Eigen::VectorXcd warm_inv_, warm_A_;
};

struct SweepOptions {
  int radii = 40;
  int angles = 40;
  int gamma_points = 64;
  double r_max = 0.0;  // 0: 1e3 max(1, nu)
  double M1 = 0.0;     // 0: numerical abscissa + 1
};

struct SweepResult {
  std::vector<ResolventSample> samples;
  double delta = 0.0;
  double w = 0.0;   // numerical abscissa
  double M1 = 0.0;
  double sup_inv = 0.0, sup_A = 0.0;
  double sup_inv_gamma = 0.0, sup_A_gamma = 0.0;
  double sup_inv_G[3] = {0, 0, 0}, sup_A_G[3] = {0, 0, 0};
  bool flagged = false;          // some sample exceeded 1e6
  double envelope_excess = 0.0;  // max over G1 of norm_Ares / (1 + |l| / (Re l - w)); <= 1 passes
  int retried = 0;
};

std::vector<cplx> gamma_contour(double delta, int m);
std::vector<ResolventSample> sweep_points(double delta, double nu, const SweepOptions& opt, double M1);
SweepResult resolvent_sweep(ResolventEngine& eng, double delta, double nu, const SweepOptions& opt = {});
SweepResult resolvent_sweep(const DiscretizedOperator& op, double delta, const SweepOptions& opt = {});

struct BoundFit {
  double c = 0.0;
  double a = 0.0, b = 0.0;       // knee: closest point to the origin in (a / a_star, b / b_star)
  double a_star = 0.0;           // a at b = 0
  double b_star = 0.0;           // smallest b with a = 0
  std::vector<double> b_grid, a_of_b;
};
// Pareto-minimal (a, b) with ||B U|| <= a ||U|| + b ||A U|| over random U.
BoundFit relative_bound_fit(const Profile& moving, const Profile& stat, int samples = 500,
                            unsigned long long seed = 1);

struct InequalityTrials {
  int trials = 0;
  int a_holds = 0;
  double a_min_defect = 0.0;      // min (||U||_Z ||F||_Z - |lhs|) / (||U||_Z ||F||_Z)
  double a_identity_error = 0.0;  // max relative |lhs - (a[u,f] + <g,v>)|
  double C1 = 0.0, C2 = 0.0;      // smallest feasible constants for (b)
  double Lambda0 = 0.0;
};
// Trials with U in the orthogonal complement of thetabar', lambda in G with |lambda| <= r_max.
InequalityTrials res_inequality_trials(const Profile& stat, double nu, double Lambda0, double delta,
                                       int trials = 100, unsigned long long seed = 1, double r_max = 20.0,
                                       double k_cut = 4.0);

}  // namespace neel
