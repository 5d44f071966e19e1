#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "neel/energy.hpp"

namespace neel {

struct Profile {
  Field theta;  // wall background
  double H = 0.0;
  double c = 0.0;
  double nu = 1.0;
  double residual = 0.0;
  Mode mode = Mode::nonlocal;
  int iterations = 0;
  std::vector<double> history;  // energy (static) or residual (traveling) per iteration

  bool is_static() const { return H == 0.0; }
  Field derivative1() const { return derivative(theta, 1); }
  Field derivative2() const { return derivative(theta, 2); }
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double last_residual, std::vector<double> history = {})
      : std::runtime_error(what), last_residual(last_residual), history(std::move(history)) {}
  double last_residual;
  std::vector<double> history;
};

struct StaticOptions {
  double tol = 1e-10;
  Mode mode = Mode::nonlocal;
  int max_iter = 5000;
  const Field* init = nullptr;  // wall-background initial guess
};

Profile solve_static(const Grid& grid, const StaticOptions& opt = {});
Profile solve_static(const Grid& grid, double tol, Mode mode = Mode::nonlocal);

// Residual c^2 psi'' - nu c psi' + grad E(psi) - H cos(psi).
Field traveling_residual(const Field& psi, double c, double nu, double H, Mode mode = Mode::nonlocal);

struct TravelingOptions {
  double tol = 1e-11;
  double max_step = 1e-3;  // continuation step in H
  int max_newton = 30;
  Mode mode = Mode::nonlocal;
};

// Bordered Newton on (w, c) with phase condition <psi - thetabar, thetabar'> = 0,
// continued in H from init.H. reference is the static wall.
Profile solve_traveling(const Grid& grid, double H, double nu, const Profile& init,
                        const Profile& reference, const TravelingOptions& opt = {});
Profile solve_traveling(const Grid& grid, double H, double nu, double tol, const Profile& init);

// Wall mass 1/2 ||theta'||^2.
double wall_mass(const Profile& p);
double wall_mass_fourier(const Profile& p);

struct MobilityResult {
  double M = 0.0;
  double nu = 1.0;
  double slope = 0.0;  // least-squares c/H through the origin (signed)
  double beta_measured = 0.0;  // |slope|
  double beta_predicted = 0.0;
  double fit_error = 0.0;
  std::vector<double> H;
  std::vector<double> c;
  std::vector<std::string> failures;
};

MobilityResult mobility(const Grid& grid, double nu, const std::vector<double>& H_list,
                        const Profile* static_wall = nullptr, Mode mode = Mode::nonlocal);

// Point-reflection x -> -x, theta -> -theta of a wall-background field.
Field reflect(const Field& f);

// Zero crossing of the reconstructed phase nearest to x_hint; linear
// interpolation between samples, then polished on the trigonometric interpolant.
double wall_position(const Field& theta, double x_hint = 0.0);

}  // namespace neel
