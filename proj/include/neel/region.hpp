#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace neel {

using cplx = std::complex<double>;

struct RegionParams {
  double nu = 1.0;
  double delta = 0.25;
  double Lambda0 = 1.0;
  double beta = 0.75;

  RegionParams() = default;
  // Rejects nu <= 0, delta outside (0, nu/2), Lambda0 <= 0, beta outside (0, 1) or 2 delta >= beta nu.
  RegionParams(double nu, double delta, double Lambda0, double beta);
  void validate() const;
  double epsilon() const;
  // Lambda0 + Lambda0^{1/2} (2 - beta) nu
  double im_threshold() const;
  // Re lambda > -beta nu / 2 and (Im lambda)^2 > im_threshold()
  bool admissible(cplx lambda) const;
};

// |conj(l) cos^2 phi + (l + nu) sin^2 phi|
double S_func(double phi, cplx lambda, double nu);
// (Re l + nu (1 + u) / 2)^2 + (Im l)^2 u^2, equal to S^2 at u = -cos 2 phi.
double f2_form(double u, cplx lambda, double nu);

double a_of(cplx lambda, double Lambda0, double nu);
// (1 - a) cos phi - (1 + a) sin phi with a = |nu + l| Lambda0^{-1/2}
double f_a_func(double phi, cplx lambda, double Lambda0, double nu);
double epsilon_of(double beta, double nu, double Lambda0);

struct MValue {
  double value = 0.0;
  double first = 0.0;   // 1 / |cos phi - |l + nu| Lambda0^{-1/2} sin phi|
  double second = 0.0;  // (|l| + |l + nu|) / S
  bool infinite = false;
};
MValue M_func(double phi, cplx lambda, const RegionParams& p);

// G = {Re l > -delta} minus the open square |Re|, |Im| < delta.
bool in_G(cplx lambda, double delta);
// {Re l > -delta, |Im l| > delta} together with the open edges delta (t +- i), |t| < 1.
bool in_G2(cplx lambda, double delta);
std::vector<cplx> gamma_contour(double delta, int m);  // defined with the resolvent sweep

// Partition of [0, pi/2] x G2 used for the uniform bound on M.
enum class MPart { H1, H2, H3 };
MPart m_part(double phi, cplx lambda, const RegionParams& p);
std::string to_string(MPart h);

struct LemmaCheck {
  std::string name;
  long samples = 0;
  long violations = 0;
  double min_margin = 0.0;  // min of (lhs - rhs) / rhs
  double worst_phi = 0.0;
  cplx worst_lambda{0.0, 0.0};
  double bound = 0.0;
  bool holds() const { return violations == 0; }
};

struct MScan {
  long samples = 0;
  double sup = 0.0;
  double sup_phi = 0.0;
  cplx sup_lambda{0.0, 0.0};
  double sup_part[3] = {0, 0, 0};
  long count_part[3] = {0, 0, 0};
  double H3_first_max = 0.0;  // largest first argument of M seen in H3
  double H3_bound = 0.0;      // 2 sqrt(2) Lambda0^{1/2} / ((1 - beta/2) nu)
  long infinite = 0;
};

struct AppendixReport {
  RegionParams params;
  unsigned long long seed = 0;
  long samples = 0;
  double form_error = 0.0;  // max |S^2 - f^2(-cos 2 phi)| / max(1, S^2)
  std::vector<LemmaCheck> checks;
  MScan scan, scan4;        // M over N and 4N samples
  double sup_change = 0.0;  // |scan4.sup - scan.sup| / scan.sup
  double H3_limit = 0.0;    // first argument of M at phi = pi/4, lambda = 1e8 i
  const LemmaCheck& check(const std::string& name) const;
};

LemmaCheck check_aux0_lower(const RegionParams& p, long samples, unsigned long long seed, double* form_error = nullptr);
LemmaCheck check_aux0_second(const RegionParams& p, long samples, unsigned long long seed, double factor = std::sqrt(2.0));
LemmaCheck check_aux1(const RegionParams& p, long samples, unsigned long long seed);
// phi_max 0: the stated range |phi| < epsilon.
LemmaCheck check_aux2(const RegionParams& p, long samples, unsigned long long seed, double phi_max = 0.0);
MScan scan_M(const RegionParams& p, long samples, unsigned long long seed);

// All sampled appendix checks; M is scanned at m_samples and 4 m_samples.
AppendixReport appendix_check(const RegionParams& p, long samples = 100000, long m_samples = 1000000,
                              unsigned long long seed = 7);

}  // namespace neel
