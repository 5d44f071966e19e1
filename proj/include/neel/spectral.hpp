#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace neel {

using Vec = std::vector<double>;
using cplx = std::complex<double>;

// Uniform periodic grid on [-L, L) with n points.
struct Grid {
  double L = 40.0;
  int n = 2048;

  Grid() = default;
  Grid(double half_length, int points);

  double dx() const { return 2.0 * L / n; }
  double x(int j) const { return -L + j * dx(); }
  Vec xs() const;
  // Wavenumber of real-FFT bin j in [0, n/2].
  double k(int j) const;
  // Signed wavenumbers k_j = pi j / L, j in {-n/2, ..., n/2-1}, in FFT order.
  Vec wavenumbers() const;
  bool operator==(const Grid& o) const { return L == o.L && n == o.n; }
};

enum class Background { none, wall };

// Behaviour across the seam x = -L ~ L. Periodic fields repeat; antiperiodic
// fields change sign. cos(theta) and sin(theta) of a wall are antiperiodic.
enum class Parity { periodic, antiperiodic };

double wall_phase(double x);   // arcsin(tanh x), evaluated as atan(sinh x)
double wall_phase_d1(double x);  // sech x
double wall_phase_d2(double x);  // -sech x tanh x

struct Field {
  Grid grid;
  Vec values;
  Background background = Background::none;

  Field() = default;
  Field(Grid g, Vec v, Background b = Background::none);
  static Field zeros(const Grid& g, Background b = Background::none);
  static Field from_function(const Grid& g, double (*f)(double));
  template <class F>
  static Field sample(const Grid& g, F&& f) {
    Field out = zeros(g);
    for (int j = 0; j < g.n; ++j) out.values[j] = f(g.x(j));
    return out;
  }
  // Reconstructed phase: values plus background.
  Vec theta() const;
  void check_finite() const;
};

struct StateVector {
  Field u;
  Field v;
  StateVector() = default;
  StateVector(Field u_, Field v_);
};

// Raw kernels on sample vectors.
namespace kernel {
void derivative(const Grid& g, std::span<const double> f, std::span<double> out, int order);
void half_laplacian(const Grid& g, std::span<const double> f, std::span<double> out,
                    Parity p = Parity::periodic);
void apply_T(const Grid& g, std::span<const double> f, std::span<double> out,
             Parity p = Parity::periodic);
// Fourier multiplier m(|k|) applied to a periodic real field.
void multiplier(const Grid& g, std::span<const double> f, std::span<double> out,
                double (*m)(double));
void shift(const Grid& g, std::span<const double> f, std::span<double> out, double s);
std::vector<cplx> rfft(const Grid& g, std::span<const double> f);
Vec irfft(const Grid& g, const std::vector<cplx>& F);
double dot(const Grid& g, std::span<const double> a, std::span<const double> b);
}  // namespace kernel

Field half_laplacian(const Field& f, Parity p = Parity::periodic);
Field apply_T(const Field& f, Parity p = Parity::periodic);
Field derivative(const Field& f, int order);
Field shift(const Field& f, double s);

// Phase value at an arbitrary point by trigonometric interpolation of the
// remainder plus the analytic background.
double evaluate(const Field& f, double x);
double evaluate_derivative(const Field& f, double x);

enum class NormKind { L2, H1, Hhalf_semi };
double norm(const Field& f, NormKind kind);
double inner(const Field& a, const Field& b);
double inner_H1(const Field& a, const Field& b);
double norm(const StateVector& U);  // H1 x L2
double inner(const StateVector& U, const StateVector& V);

// Coefficients of the profile-dependent form
// a[u,w] = <u',w'> + <s T(s u), w> - <c u, w>, with c = cos(theta) T(cos(theta)).
struct FormCoefficients {
  Grid grid;
  Vec s;
  Vec c;
  bool nonlocal = true;
};
FormCoefficients form_coefficients(const Field& theta, bool nonlocal = true);
double a_form(const FormCoefficients& fc, const Field& u, const Field& w);
double a_norm(const FormCoefficients& fc, const Field& u);
double z_inner(const FormCoefficients& fc, const StateVector& U, const StateVector& V);
double z_norm(const FormCoefficients& fc, const StateVector& U);

// Dense realizations (column-major, n x n) of the grid operators.
Eigen::MatrixXd dense_derivative(const Grid& g, int order);
Eigen::MatrixXd dense_T(const Grid& g, Parity p);
// Fourier multiplier (1 + k^2)^{power} as a dense symmetric matrix.
Eigen::MatrixXd dense_sobolev(const Grid& g, double power);

// Band-limited random field with unit L2 norm; the top quarter of modes is zero.
Field random_bandlimited(const Grid& g, unsigned long long seed, double keep_fraction = 0.75);

}  // namespace neel
