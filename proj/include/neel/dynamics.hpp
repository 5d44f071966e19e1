#pragma once

#include <optional>
#include <string>
#include <vector>

#include "neel/linops.hpp"

namespace neel {

enum class Integrator { semi_implicit, rk4 };
enum class Frame { lab, comoving };
enum class Shape { sech, odd_sech, noise };

std::string to_string(Integrator i);
std::string to_string(Frame f);
std::string to_string(Shape s);

struct Perturbation {
  Shape shape = Shape::sech;
  double amplitude = 0.05;
  unsigned long long seed = 1;
};

// sech: a sech(x); odd_sech: a x sech(x); noise: a times a smooth field of unit H1 norm.
Field perturbation_field(const Grid& g, const Perturbation& p);

struct SimConfig {
  double dt = 1e-3;
  double t_end = 40.0;
  double nu = 1.0;
  double H = 0.0;
  double c = 0.0;  // frame speed for the comoving frame and the reference offset in the lab frame
  Integrator integrator = Integrator::semi_implicit;
  Frame frame = Frame::lab;
  Mode mode = Mode::nonlocal;
  int max_frames = 4096;
  double blowup = 1e3;
  bool check = true;  // enforce t_end >= 10 / nu and the amplitude bound

  void validate() const;
};

struct SimTrace {
  std::vector<double> t;
  std::vector<double> residual_H1;
  std::vector<double> wall_position;
  std::vector<double> s;
  std::vector<double> energy;
  std::vector<double> v_norm;
  std::vector<double> defect;
  std::vector<double> orthogonality;  // <theta - psi_s, psi_s'> at the fitted shift
  StateVector final_state;
};

class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, SimTrace trace)
      : std::runtime_error(what), trace(std::move(trace)) {}
  SimTrace trace;
};

// Runs from (theta0, v0). reference supplies psi for the modulated residual; without it the
// residual, s and orthogonality series hold NaN.
SimTrace integrate(const SimConfig& cfg, const StateVector& initial, const Profile* reference = nullptr);

// One step of the integrator on (w, v), exposed for convergence tests.
StateVector step(const SimConfig& cfg, const StateVector& state, int steps);

// Comoving right-hand side F(theta, phi) and the remainder F(psi + W) - F(psi) - A_c W.
StateVector vector_field(const StateVector& state, double c, double nu, double H, Mode mode = Mode::nonlocal);

// Frozen single mode u'' + nu u' + Lambda u = 0 through the same splitting.
struct ModeResult {
  double u = 0.0, v = 0.0;
  double u_exact = 0.0, v_exact = 0.0;
};
ModeResult damped_mode(double Lambda, double nu, double dt, double t_end, Integrator integ, double u0 = 1.0,
                       double v0 = 0.0);

struct Modulation {
  double s = 0.0;
  double orthogonality = 0.0;
  double residual_H1 = 0.0;
};
// Minimizes ||theta - psi(. - offset - s)||_{L2} over s near s_hint.
Modulation modulate(const Field& theta, const Profile& reference, double offset = 0.0, double s_hint = 0.0);

struct DecayFit {
  double omega = 0.0;
  double C = 0.0;
  double r2 = 0.0;
  int points = 0;
  bool clean() const { return omega > 0.0 && r2 >= 0.98; }
};
// Least squares on log r over t >= t_min, stopping before r drops below floor.
DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& r, double t_min,
                   double floor = 1e-12, double t_max = 1e300);

struct OrbitalResult {
  double H = 0.0, c = 0.0, nu = 1.0;
  double perturbation_H1 = 0.0;
  DecayFit fit;
  double speed = 0.0;           // fitted wall speed over the final half
  double final_position = 0.0;
  double predicted_shift = 0.0; // linear-theory asymptotic shift from the spectral projector
  double A2_ratio = 0.0;        // max over s of ||phi(s) - phi(0) - phi'(0) s|| / s^2
  double A2_bound = 0.0;        // ||psi''||_{H1} / sqrt(3)
  double A3_exponent = 0.0;     // log-log slope of the quadratic remainder
  std::vector<double> A3_amplitudes, A3_remainders;
  bool stable = false;
  std::string verdict;
  SimTrace trace;
};

OrbitalResult orbital_experiment(const Profile& reference, const Perturbation& pert, const SimConfig& cfg);

}  // namespace neel
